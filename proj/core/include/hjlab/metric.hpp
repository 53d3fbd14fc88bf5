#pragma once

#include <span>
#include <vector>

#include "hjlab/grid.hpp"
#include "hjlab/hamiltonian.hpp"

namespace hjlab {

/// Metric problem H(Dm, y, omega) = mu, m(base) = 0, for one level.
struct MetricQuery {
  AssembledHamiltonian hamiltonian;
  double mu;
  double base;
};

struct MetricOptions {
  double max_step = 0.05;
  /// mu must exceed sup H(0, .) on the range by at least this much.
  double admissibility_margin = 1e-8;
};

/// Certified slope envelope l|y - x| <= m(y) <= L|y - x| on a range.
struct SlopeEnvelope {
  double l_mu;
  double L_mu;
};

/// Sampled metric m_mu(., base).
struct MetricProfile {
  MetricQuery query;
  std::vector<double> y;
  std::vector<double> m;
  SlopeEnvelope bounds{};
};

/// Maximal subsolution normalized at the base point, in closed form:
///   y > x:  m(y) = int_x^y p^+(s, mu) ds
///   y < x:  m(y) = int_y^x -p^-(s, mu) ds
/// Throws LevelNotAdmissible when mu does not exceed sup H(0, .) on the range.
double metric_value(const MetricQuery& query, double y, const MetricOptions& opts = {});

/// m_mu(y, x) for several levels, sharing quadrature nodes.
std::vector<double> metric_values(const AssembledHamiltonian& h, std::span<const double> mus, double x, double y,
                                  const MetricOptions& opts = {});

/// Closed form at many points, accumulated along the sorted points.
MetricProfile metric_profile(const MetricQuery& query, std::span<const double> ys, const MetricOptions& opts = {});

/// Discrete maximal subsolution on a grid: fixed point of
///   m_i <- min(m_{i-1} + dx p^+(mid), m_{i+1} + dx (-p^-(mid)))
/// reached by alternating sweeps. The base point must be a grid node.
MetricProfile metric_oracle(const MetricQuery& query, const Grid1D& grid, const MetricOptions& opts = {});

/// n_mu(y, x) for the reversed Hamiltonian G(p, y) = H(-p, y); equals
/// m_mu(x, y) (base y, evaluated at x).
double reversed_metric(const MetricQuery& query, double y, const MetricOptions& opts = {});

/// l_mu = min of min(p^+, -p^-), L_mu = max of max(p^+, -p^-) over the
/// quadrature nodes of [a, b].
SlopeEnvelope slope_envelope(const AssembledHamiltonian& h, double mu, double a, double b,
                             const MetricOptions& opts = {});

/// sup of H(0, s) over the quadrature nodes and piece ends of [a, b].
double sup_at_zero(const AssembledHamiltonian& h, double a, double b, const MetricOptions& opts = {});

/// max(0, m(z, x) - m(z, y) - m(y, x)) where dist(a, b) = m_mu(a, b).
template <class Dist>
double subadditivity_defect(Dist&& dist, double x, double y, double z) {
  const double d = dist(z, x) - dist(z, y) - dist(y, x);
  return d > 0.0 ? d : 0.0;
}

/// Closed-form version of the above.
double subadditivity_defect(const AssembledHamiltonian& h, double mu, double x, double y, double z,
                            const MetricOptions& opts = {});

}  // namespace hjlab
