#include "hjlab/metric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "hjlab/errors.hpp"
#include "hjlab/quadrature.hpp"

namespace hjlab {

namespace {

void require_admissible(double mu, double sup0, const MetricOptions& opts, double a, double b) {
  if (!(mu >= sup0 + opts.admissibility_margin))
    throw LevelNotAdmissible("level mu = " + std::to_string(mu) + " is not admissible on [" + std::to_string(a) +
                             ", " + std::to_string(b) + "]: sup H(0, .) = " + std::to_string(sup0));
}

double sup_over_nodes(const AssembledHamiltonian& h, const std::vector<QuadratureNode>& nodes, double a,
                      double b) {
  double sup0 = std::max(h.at_zero(a), h.at_zero(b));
  for (const auto& n : nodes) sup0 = std::max(sup0, h.at_zero(n.s));
  return sup0;
}

// int_a^b of the branch (plus for rightward, -minus for leftward)
double integrate_branch(const AssembledHamiltonian& h, double mu, double a, double b, Side side,
                        const MetricOptions& opts) {
  if (!(a < b)) return 0.0;
  const auto nodes = quadrature_nodes(h, a, b, opts.max_step);
  require_admissible(mu, sup_over_nodes(h, nodes, a, b), opts, a, b);
  const double sign = side == Side::plus ? 1.0 : -1.0;
  double acc = 0.0;
  for (const auto& n : nodes) acc += n.w * sign * h.branch(n.s, mu, side);
  return acc;
}

}  // namespace

double sup_at_zero(const AssembledHamiltonian& h, double a, double b, const MetricOptions& opts) {
  const auto nodes = quadrature_nodes(h, a, b, opts.max_step);
  double sup0 = sup_over_nodes(h, nodes, a, b);
  for (const auto& piece : smooth_pieces(h, a, b)) sup0 = std::max(sup0, h.at_zero(piece.lo));
  return sup0;
}

double metric_value(const MetricQuery& query, double y, const MetricOptions& opts) {
  const double x = query.base;
  if (y == x) return 0.0;
  if (y > x) return integrate_branch(query.hamiltonian, query.mu, x, y, Side::plus, opts);
  return integrate_branch(query.hamiltonian, query.mu, y, x, Side::minus, opts);
}

std::vector<double> metric_values(const AssembledHamiltonian& h, std::span<const double> mus, double x, double y,
                                  const MetricOptions& opts) {
  std::vector<double> out(mus.size(), 0.0);
  if (y == x || mus.empty()) return out;
  const double a = std::min(x, y);
  const double b = std::max(x, y);
  const Side side = y > x ? Side::plus : Side::minus;
  const double sign = side == Side::plus ? 1.0 : -1.0;
  const auto nodes = quadrature_nodes(h, a, b, opts.max_step);
  const double sup0 = sup_over_nodes(h, nodes, a, b);
  for (double mu : mus) require_admissible(mu, sup0, opts, a, b);
  for (const auto& n : nodes) {
    const LocalHamiltonian loc = h.local(n.s);
    for (std::size_t k = 0; k < mus.size(); ++k) out[k] += n.w * sign * loc.branch(mus[k], side);
  }
  return out;
}

MetricProfile metric_profile(const MetricQuery& query, std::span<const double> ys, const MetricOptions& opts) {
  MetricProfile prof{query, std::vector<double>(ys.begin(), ys.end()), std::vector<double>(ys.size(), 0.0), {}};
  const double x = query.base;
  std::vector<std::size_t> order(ys.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return ys[i] < ys[j]; });

  // right of the base, ascending
  double prev = x;
  double acc = 0.0;
  for (std::size_t i : order) {
    if (ys[i] <= x) continue;
    acc += integrate_branch(query.hamiltonian, query.mu, prev, ys[i], Side::plus, opts);
    prev = ys[i];
    prof.m[i] = acc;
  }
  // left of the base, descending
  prev = x;
  acc = 0.0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const std::size_t i = *it;
    if (ys[i] >= x) continue;
    acc += integrate_branch(query.hamiltonian, query.mu, ys[i], prev, Side::minus, opts);
    prev = ys[i];
    prof.m[i] = acc;
  }
  if (!ys.empty()) {
    const auto [lo, hi] = std::minmax_element(ys.begin(), ys.end());
    prof.bounds = slope_envelope(query.hamiltonian, query.mu, std::min(*lo, x), std::max(*hi, x), opts);
  }
  return prof;
}

MetricProfile metric_oracle(const MetricQuery& query, const Grid1D& grid, const MetricOptions& opts) {
  const auto base = grid.node_at(query.base);
  if (!base) throw InvalidArgument("metric oracle requires the base point to be a grid node");
  const std::size_t n = grid.nx;
  const AssembledHamiltonian& h = query.hamiltonian;
  const double mu = query.mu;

  std::vector<double> cost_right(n > 0 ? n - 1 : 0);
  std::vector<double> cost_left(cost_right.size());
  double sup0 = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < n; ++i) sup0 = std::max(sup0, h.at_zero(grid.x(i) + 0.5 * grid.dx));
  require_admissible(mu, sup0, opts, grid.x_min, grid.x_max);

  SlopeEnvelope env{std::numeric_limits<double>::infinity(), 0.0};
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const LocalHamiltonian loc = h.local(grid.x(i) + 0.5 * grid.dx);
    const double pp = loc.branch(mu, Side::plus);
    const double pm = -loc.branch(mu, Side::minus);
    cost_right[i] = grid.dx * pp;
    cost_left[i] = grid.dx * pm;
    env.l_mu = std::min(env.l_mu, std::min(pp, pm));
    env.L_mu = std::max(env.L_mu, std::max(pp, pm));
  }

  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> m(n, kInf);
  m[*base] = 0.0;
  constexpr int kMaxSweeps = 100;
  int sweep = 0;
  for (;; ++sweep) {
    if (sweep >= kMaxSweeps)
      throw NonConvergence("metric oracle sweeps did not stabilize (inadmissible mu = " + std::to_string(mu) + "?)");
    double change = 0.0;
    const auto relax = [&](std::size_t i, double candidate) {
      if (candidate < m[i]) {
        change = std::max(change, m[i] == kInf ? kInf : m[i] - candidate);
        m[i] = candidate;
      }
    };
    for (std::size_t i = 1; i < n; ++i) relax(i, m[i - 1] + cost_right[i - 1]);
    for (std::size_t i = n - 1; i-- > 0;) relax(i, m[i + 1] + cost_left[i]);
    if (change < 1e-12) break;
  }

  MetricProfile prof{query, {}, std::move(m), env};
  prof.y.resize(n);
  for (std::size_t i = 0; i < n; ++i) prof.y[i] = grid.x(i);
  return prof;
}

double reversed_metric(const MetricQuery& query, double y, const MetricOptions& opts) {
  MetricQuery rev{query.hamiltonian.reversed(), query.mu, query.base};
  return metric_value(rev, y, opts);
}

SlopeEnvelope slope_envelope(const AssembledHamiltonian& h, double mu, double a, double b,
                             const MetricOptions& opts) {
  SlopeEnvelope env{std::numeric_limits<double>::infinity(), 0.0};
  if (!(a < b)) return {0.0, 0.0};
  for (const auto& n : quadrature_nodes(h, a, b, opts.max_step)) {
    const LocalHamiltonian loc = h.local(n.s);
    const double pp = loc.branch(mu, Side::plus);
    const double pm = -loc.branch(mu, Side::minus);
    env.l_mu = std::min(env.l_mu, std::min(pp, pm));
    env.L_mu = std::max(env.L_mu, std::max(pp, pm));
  }
  return env;
}

double subadditivity_defect(const AssembledHamiltonian& h, double mu, double x, double y, double z,
                            const MetricOptions& opts) {
  const auto dist = [&](double target, double base) { return metric_value(MetricQuery{h, mu, base}, target, opts); };
  return subadditivity_defect(dist, x, y, z);
}

}  // namespace hjlab
