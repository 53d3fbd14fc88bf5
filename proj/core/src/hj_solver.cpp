#include "hjlab/hj_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "hjlab/errors.hpp"

namespace hjlab {

InitialData::InitialData(std::vector<std::pair<double, double>> breakpoints, double left_slope, double right_slope)
    : breakpoints_(std::move(breakpoints)), left_slope_(left_slope), right_slope_(right_slope) {
  if (breakpoints_.empty()) throw InvalidArgument("initial data needs at least one breakpoint");
  for (std::size_t i = 1; i < breakpoints_.size(); ++i)
    if (!(breakpoints_[i].first > breakpoints_[i - 1].first))
      throw InvalidArgument("initial data breakpoints must be strictly increasing in x");
}

InitialData InitialData::piecewise_linear(std::vector<std::pair<double, double>> bp) {
  double ls = 0.0, rs = 0.0;
  if (bp.size() >= 2) {
    const std::size_t n = bp.size();
    ls = (bp[1].second - bp[0].second) / (bp[1].first - bp[0].first);
    rs = (bp[n - 1].second - bp[n - 2].second) / (bp[n - 1].first - bp[n - 2].first);
  }
  return InitialData(std::move(bp), ls, rs);
}

double InitialData::operator()(double x) const {
  const auto& b = breakpoints_;
  if (x <= b.front().first) return b.front().second + left_slope_ * (x - b.front().first);
  if (x >= b.back().first) return b.back().second + right_slope_ * (x - b.back().first);
  const auto it = std::upper_bound(b.begin(), b.end(), x, [](double v, const auto& p) { return v < p.first; });
  const auto& [x1, u1] = *it;
  const auto& [x0, u0] = *(it - 1);
  return u0 + (u1 - u0) * (x - x0) / (x1 - x0);
}

double InitialData::lipschitz() const {
  double lip = std::max(std::abs(left_slope_), std::abs(right_slope_));
  for (std::size_t i = 1; i < breakpoints_.size(); ++i)
    lip = std::max(lip, std::abs((breakpoints_[i].second - breakpoints_[i - 1].second) /
                                 (breakpoints_[i].first - breakpoints_[i - 1].first)));
  return lip;
}

double SolutionField::value(std::size_t k, double x) const {
  const auto& v = values.at(k);
  const double s = std::clamp((x - grid.x_min) / grid.dx, 0.0, static_cast<double>(grid.nx - 1));
  const auto i = std::min(static_cast<std::size_t>(s), grid.nx - 1);
  if (i + 1 >= grid.nx) return v.back();
  const double t = s - static_cast<double>(i);
  return v[i] + t * (v[i + 1] - v[i]);
}

namespace {

double discrete_lipschitz(const std::vector<double>& u, double dx) {
  double lip = 0.0;
  for (std::size_t i = 0; i + 1 < u.size(); ++i) lip = std::max(lip, std::abs(u[i + 1] - u[i]) / dx);
  return lip;
}

void check_cfl(double cfl) {
  if (!(cfl > 0.0 && cfl <= 0.9)) throw CflViolation("CFL number must lie in (0, 0.9], got " + std::to_string(cfl));
}

// Explicit monotone time stepping u_i <- u_i - dt g(i, D^- u_i, D^+ u_i, has_left, has_right).
// lip(R) bounds |dH/dp| for slopes |p| <= R.
template <class Node, class Lip>
SolutionField march(const InitialData& u0, double t_final, const Grid1D& grid, const SolverOptions& opts,
                    const Node& node, const Lip& lip_of, double barrier_constant) {
  check_cfl(opts.cfl);
  if (!(t_final >= 0.0)) throw InvalidArgument("final time must be non-negative");
  if (grid.nx < 2) throw InvalidArgument("grid needs at least two nodes");
  const std::size_t n = grid.nx;
  const double dx = grid.dx;

  SolutionField f;
  f.grid = grid;
  f.cfl = opts.cfl;
  f.scheme = opts.scheme;
  f.barrier_constant = barrier_constant;

  std::vector<double> u(n), next(n), init(n);
  for (std::size_t i = 0; i < n; ++i) init[i] = u0(grid.x(i));
  u = init;

  std::vector<double> outs;
  for (double t : opts.output_times) {
    if (!(t > 0.0 && t <= t_final)) throw InvalidArgument("output times must lie in (0, T]");
    outs.push_back(t);
  }
  if (t_final > 0.0) outs.push_back(t_final);
  std::sort(outs.begin(), outs.end());
  outs.erase(std::unique(outs.begin(), outs.end()), outs.end());

  const auto store = [&](double t) {
    f.times.push_back(t);
    f.values.push_back(u);
    f.lipschitz.push_back(discrete_lipschitz(u, dx));
  };
  store(0.0);
  f.dt_min = std::numeric_limits<double>::infinity();

  double t = 0.0;
  std::size_t next_out = 0;
  while (next_out < outs.size()) {
    const double slope = discrete_lipschitz(u, dx);
    const double lip = lip_of(slope);
    double dt;
    if (opts.dt) {
      dt = *opts.dt;
      if (!(dt > 0.0)) throw InvalidArgument("fixed time step must be positive");
      if (dt * lip / dx > 0.9 * (1.0 + 1e-12))
        throw CflViolation("fixed dt = " + std::to_string(dt) + " gives CFL " + std::to_string(dt * lip / dx) +
                           " > 0.9");
    } else {
      dt = lip > 0.0 ? opts.cfl * dx / lip : outs[next_out] - t;
    }
    bool hit = false;
    if (t + dt >= outs[next_out] - 1e-9 * dt) {
      dt = outs[next_out] - t;
      hit = true;
    }
    for (std::size_t i = 0; i < n; ++i) {
      const bool has_l = i > 0;
      const bool has_r = i + 1 < n;
      const double pl = has_l ? (u[i] - u[i - 1]) / dx : 0.0;
      const double pr = has_r ? (u[i + 1] - u[i]) / dx : 0.0;
      next[i] = u[i] - dt * node(i, pl, pr, has_l, has_r, lip);
    }
    u.swap(next);
    t = hit ? outs[next_out] : t + dt;
    ++f.steps;
    f.dt_min = std::min(f.dt_min, dt);
    f.dt_max = std::max(f.dt_max, dt);

    double dev = 0.0;
    for (std::size_t i = 0; i < n; ++i) dev = std::max(dev, std::abs(u[i] - init[i]));
    const double rate = t > 0.0 ? dev / t : 0.0;
    f.barrier_rate = std::max(f.barrier_rate, rate);
    if (rate > barrier_constant + 1e-8) f.barrier_ok = false;

    if (hit) {
      store(t);
      ++next_out;
    } else if (opts.keep_all_steps) {
      store(t);
    }
  }
  if (f.steps == 0) f.dt_min = 0.0;
  return f;
}

// Godunov or LF value for a convex h with the outflow closure at the ends
template <class H>
double node_flux(const H& h, double pl, double pr, bool has_l, bool has_r, Scheme scheme, double alpha) {
  if (!has_l) return h.minus(pr);
  if (!has_r) return h.plus(pl);
  return numerical_flux(h, pl, pr, scheme, alpha);
}

template <class H>
double sup_abs_on(const H& h, double radius) {
  return std::max({std::abs(h(radius)), std::abs(h(-radius)), std::abs(h(0.0))});
}

double initial_discrete_lipschitz(const InitialData& u0, const Grid1D& grid) {
  std::vector<double> u(grid.nx);
  for (std::size_t i = 0; i < grid.nx; ++i) u[i] = u0(grid.x(i));
  return discrete_lipschitz(u, grid.dx);
}

}  // namespace

SolutionField solve_epsilon(const InitialData& u0, double epsilon, double t_final, const AssembledHamiltonian& h,
                            const Grid1D& grid, const SolverOptions& opts) {
  if (!(epsilon > 0.0)) throw InvalidArgument("epsilon must be positive");
  if (grid.dx > epsilon / 20.0 * (1.0 + 1e-9))
    throw UnresolvedScale("grid step dx = " + std::to_string(grid.dx) + " does not resolve epsilon = " +
                          std::to_string(epsilon) + " (need dx <= epsilon / 20)");
  check_cfl(opts.cfl);
  std::vector<LocalHamiltonian> loc(grid.nx);
  const double l0 = initial_discrete_lipschitz(u0, grid);
  double c = 0.0;
  for (std::size_t i = 0; i < grid.nx; ++i) {
    loc[i] = h.local(grid.x(i) / epsilon);
    if (!loc[i].convex()) throw InvalidArgument("solve_epsilon needs a convex Hamiltonian");
    c = std::max(c, sup_abs_on(loc[i], l0));
  }
  const auto node = [&](std::size_t i, double pl, double pr, bool hl, bool hr, double lip) {
    return node_flux(loc[i], pl, pr, hl, hr, opts.scheme, lip);
  };
  const auto lip = [&](double r) { return h.lipschitz(r); };
  // the Lax-Friedrichs viscosity term adds up to alpha L to the discrete barrier
  if (opts.scheme == Scheme::lax_friedrichs) c += lip(l0) * l0;
  return march(u0, t_final, grid, opts, node, lip, c);
}

SolutionField solve_limit(const InitialData& u0, const EffectiveHamiltonian& left, const EffectiveHamiltonian& right,
                          double a_bar, double t_final, const Grid1D& grid, const SolverOptions& opts) {
  const auto j = grid.junction_index ? grid.junction_index : grid.node_at(0.0);
  if (!j)
    throw InvalidArgument(
        "junction precondition violated: x = 0 must be a grid node for the flux-limited junction condition");
  const double floor = std::max(left.minimum(), right.minimum());
  if (a_bar < floor - 1e-12 * std::max(1.0, std::abs(floor)))
    throw InvalidLimiter("flux limiter Abar = " + std::to_string(a_bar) + " is below max(min Hbar_L, min Hbar_R) = " +
                         std::to_string(floor));
  check_cfl(opts.cfl);
  const std::size_t jn = *j;
  const double l0 = initial_discrete_lipschitz(u0, grid);
  const double c = std::max({sup_abs_on(left, l0), sup_abs_on(right, l0), std::abs(a_bar)});
  const auto node = [&](std::size_t i, double pl, double pr, bool hl, bool hr, double lip) {
    if (i < jn) return node_flux(left, pl, pr, hl, hr, opts.scheme, lip);
    if (i > jn) return node_flux(right, pl, pr, hl, hr, opts.scheme, lip);
    double g = a_bar;
    if (hl) g = std::max(g, left.plus(pl));
    if (hr) g = std::max(g, right.minus(pr));
    return g;
  };
  const double lip_max = std::max(left.lipschitz(), right.lipschitz());
  const auto lip = [&](double) { return lip_max; };
  const double c_scheme = opts.scheme == Scheme::lax_friedrichs ? c + lip_max * l0 : c;
  return march(u0, t_final, grid, opts, node, lip, c_scheme);
}

}  // namespace hjlab
