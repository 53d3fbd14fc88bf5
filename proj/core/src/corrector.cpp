#include "hjlab/corrector.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <tuple>

#include "hjlab/errors.hpp"
#include "hjlab/stats.hpp"

namespace hjlab {

namespace {

// root of an increasing function on [lo, hi] with g(lo) <= 0 <= g(hi)
// (Illinois false position with bisection safeguard)
template <class G>
double increasing_root(const G& g, double lo, double hi) {
  double glo = g(lo);
  double ghi = g(hi);
  if (glo >= 0.0) return lo;
  if (ghi <= 0.0) return hi;
  int side = 0;
  for (int it = 0; it < 200; ++it) {
    double x = (lo * ghi - hi * glo) / (ghi - glo);
    if (!(x > lo && x < hi) || it % 4 == 3) x = 0.5 * (lo + hi);
    if (x <= lo || x >= hi) break;
    const double gx = g(x);
    if (gx == 0.0) return x;
    if (gx < 0.0) {
      lo = x;
      glo = gx;
      if (side == -1) ghi *= 0.5;
      side = -1;
    } else {
      hi = x;
      ghi = gx;
      if (side == 1) glo *= 0.5;
      side = 1;
    }
  }
  return std::abs(glo) < std::abs(ghi) ? lo : hi;
}

struct Stencil {
  const std::vector<LocalHamiltonian>& loc;
  double delta;
  double ps;
  double dx;

  // numerical Hamiltonian at node i with the outflow closure at the ends
  double hamiltonian(const std::vector<double>& v, std::size_t i) const {
    const std::size_t n = v.size();
    double g = -std::numeric_limits<double>::infinity();
    if (i > 0) g = std::max(g, loc[i].plus(ps + (v[i] - v[i - 1]) / dx));
    if (i + 1 < n) g = std::max(g, loc[i].minus(ps + (v[i + 1] - v[i]) / dx));
    return g;
  }

  double residual(const std::vector<double>& v) const {
    double r = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) r = std::max(r, std::abs(delta * v[i] + hamiltonian(v, i)));
    return r;
  }

  // value of v_i solving the local equation with neighbours frozen
  double local_solve(const std::vector<double>& v, std::size_t i) const {
    const std::size_t n = v.size();
    const LocalHamiltonian& h = loc[i];
    const double flat = -h(0.0) / delta;
    double best = std::numeric_limits<double>::infinity();
    if (i > 0) {
      const double a = v[i - 1] - ps * dx;  // slope argument is >= 0 above a
      double r = flat;
      if (flat > a) {
        const auto g = [&](double x) { return delta * x + h.plus(ps + (x - v[i - 1]) / dx); };
        r = increasing_root(g, a, flat);
      }
      best = std::min(best, r);
    }
    if (i + 1 < n) {
      const double b = v[i + 1] + ps * dx;  // slope argument is >= 0 below b
      double r = flat;
      if (flat > b) {
        const auto g = [&](double x) { return delta * x + h.minus(ps + (v[i + 1] - x) / dx); };
        r = increasing_root(g, b, flat);
      }
      best = std::min(best, r);
    }
    return best;
  }
};

}  // namespace

double CorrectorResult::value_at(double y) const {
  if (values.empty()) return 0.0;
  const double s = std::clamp((y - grid.x_min) / grid.dx, 0.0, static_cast<double>(grid.nx - 1));
  const auto i = std::min(static_cast<std::size_t>(s), grid.nx - 1);
  if (i + 1 >= grid.nx) return values.back();
  const double t = s - static_cast<double>(i);
  return values[i] + t * (values[i + 1] - values[i]);
}

std::vector<double> CorrectorResult::rescaled_positions() const {
  std::vector<double> z(grid.nx);
  for (std::size_t i = 0; i < grid.nx; ++i) z[i] = delta * grid.x(i);
  return z;
}

std::vector<double> CorrectorResult::rescaled_values() const {
  std::vector<double> w(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) w[i] = delta * values[i];
  return w;
}

double CorrectorResult::deviation(double radius, double target) const {
  const double r = radius / delta;
  double dev = 0.0;
  for (std::size_t i = 0; i < grid.nx; ++i)
    if (std::abs(grid.x(i)) <= r * (1.0 + 1e-12)) dev = std::max(dev, std::abs(delta * values[i] + target));
  return dev;
}

CorrectorResult corrector_solve(const AssembledHamiltonian& h, const CorrectorOptions& opts) {
  if (!(opts.delta > 0.0)) throw InvalidArgument("corrector needs delta > 0");
  if (!(opts.dx > 0.0) || !(opts.half_width > opts.dx)) throw InvalidArgument("corrector needs 0 < dx < half_width");
  const double half = std::ceil(opts.half_width / opts.dx - 1e-9) * opts.dx;
  CorrectorResult res;
  res.delta = opts.delta;
  res.p_shift = opts.p_shift;
  res.grid = Grid1D::uniform(-half, half, opts.dx);
  const std::size_t n = res.grid.nx;

  std::vector<LocalHamiltonian> loc(n);
  double e = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    loc[i] = h.local(res.grid.x(i));
    if (!loc[i].convex()) throw InvalidArgument("corrector needs a convex Hamiltonian");
    e = std::max(e, std::abs(loc[i](opts.p_shift)));
  }
  res.barrier = e;
  const Stencil st{loc, opts.delta, opts.p_shift, opts.dx};
  const double bound = e / opts.delta * (1.0 + 1e-12) + 1e-12;
  const auto check_barrier = [&](const std::vector<double>& v) {
    for (double x : v)
      if (std::abs(x) > bound) res.barrier_ok = false;
  };
  const double target = opts.tolerance * opts.delta;

  std::vector<double>& v = res.values;
  if (opts.method == CorrectorMethod::sweeping) {
    // start from the constant supersolution E / delta; iterates decrease
    v.assign(n, e / opts.delta);
    for (int it = 1;; ++it) {
      double change = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double x = st.local_solve(v, i);
        change = std::max(change, std::abs(x - v[i]));
        v[i] = x;
      }
      for (std::size_t i = n; i-- > 0;) {
        const double x = st.local_solve(v, i);
        change = std::max(change, std::abs(x - v[i]));
        v[i] = x;
      }
      check_barrier(v);
      res.iterations = it;
      res.residual = st.residual(v);
      if (res.residual < target || change == 0.0) break;
      if (it >= opts.max_iterations)
        throw NonConvergence("corrector sweeps stalled at residual " + std::to_string(res.residual) +
                             " (delta = " + std::to_string(opts.delta) + ")");
    }
  } else {
    if (!(opts.cfl > 0.0 && opts.cfl <= 0.9)) throw CflViolation("corrector time marching needs 0 < cfl <= 0.9");
    v.resize(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = -loc[i](opts.p_shift) / opts.delta;
    std::vector<double> next(n);
    double prev_res = std::numeric_limits<double>::infinity();
    int stalled = 0;
    for (int it = 1;; ++it) {
      double slope = 0.0;
      for (std::size_t i = 0; i + 1 < n; ++i) slope = std::max(slope, std::abs(v[i + 1] - v[i]) / opts.dx);
      const double lip = h.lipschitz(slope + std::abs(opts.p_shift));
      const double dt = opts.cfl * opts.dx / (lip + opts.delta * opts.dx);
      double r = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double f = opts.delta * v[i] + st.hamiltonian(v, i);
        r = std::max(r, std::abs(f));
        next[i] = v[i] - dt * f;
      }
      v.swap(next);
      check_barrier(v);
      res.iterations = it;
      res.residual = r;
      if (r < target) break;
      stalled = r >= prev_res ? stalled + 1 : 0;
      prev_res = r;
      if (it >= opts.max_iterations || stalled > 1000)
        throw NonConvergence("corrector time marching stalled at residual " + std::to_string(r) +
                             " (cfl = " + std::to_string(opts.cfl) + ", delta = " + std::to_string(opts.delta) + ")");
    }
    res.residual = st.residual(v);
  }

  for (std::size_t i = 0; i + 1 < n; ++i) res.lipschitz = std::max(res.lipschitz, std::abs(v[i + 1] - v[i]) / opts.dx);
  return res;
}

std::pair<double, double> right_slope_interval(const EffectiveHamiltonian& right, double a_bar) {
  const double flat = right.minimum();
  if (a_bar > flat + 1e-9 * std::max(1.0, std::abs(flat))) {
    const double p = right.level_set(a_bar, Side::plus);
    return {p, p};
  }
  return {right.level_set(flat, Side::minus), right.level_set(flat, Side::plus)};
}

std::pair<double, double> left_slope_interval(const EffectiveHamiltonian& left, double a_bar) {
  const double flat = left.minimum();
  if (a_bar > flat + 1e-9 * std::max(1.0, std::abs(flat))) {
    const double p = left.level_set(a_bar, Side::minus);
    return {p, p};
  }
  return {left.level_set(flat, Side::minus), left.level_set(flat, Side::plus)};
}

CorrectorSlopeReport corrector_slopes(const CorrectorResult& result, double a_bar, const EffectiveHamiltonian& left,
                                      const EffectiveHamiltonian& right, double fit_lo, double fit_hi,
                                      double tolerance) {
  CorrectorSlopeReport rep;
  rep.fit_lo = fit_lo;
  rep.fit_hi = fit_hi;
  rep.tolerance = tolerance;
  std::tie(rep.right_lo, rep.right_hi) = right_slope_interval(right, a_bar);
  std::tie(rep.left_lo, rep.left_hi) = left_slope_interval(left, a_bar);
  rep.center_offset = result.delta * result.value_at(0.0) + a_bar;

  std::vector<double> xr, vr, xl, vl;
  for (std::size_t i = 0; i < result.grid.nx; ++i) {
    const double y = result.grid.x(i);
    if (y >= fit_lo && y <= fit_hi) {
      xr.push_back(y);
      vr.push_back(result.values[i]);
    }
    if (y <= -fit_lo && y >= -fit_hi) {
      xl.push_back(y);
      vl.push_back(result.values[i]);
    }
  }
  if (xr.size() < 2 || xl.size() < 2) return rep;
  rep.fitted = true;
  rep.right_slope = linear_fit(xr, vr).slope;
  rep.left_slope = linear_fit(xl, vl).slope;
  rep.right_ok = rep.right_slope >= rep.right_lo - tolerance && rep.right_slope <= rep.right_hi + tolerance;
  rep.left_ok = rep.left_slope >= rep.left_lo - tolerance && rep.left_slope <= rep.left_hi + tolerance;

  // C = max over y <= y' of pbar (y' - y) - (v(y') - v(y))
  const double pbar = rep.right_lo;
  double lowest = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < xr.size(); ++k) {
    const double g = pbar * xr[k] - vr[k];
    lowest = std::min(lowest, g);
    rep.control_constant = std::max(rep.control_constant, g - lowest);
  }
  return rep;
}

}  // namespace hjlab
