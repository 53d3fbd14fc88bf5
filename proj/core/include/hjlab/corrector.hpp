#pragma once

#include <vector>

#include "hjlab/effective.hpp"
#include "hjlab/grid.hpp"
#include "hjlab/hamiltonian.hpp"

namespace hjlab {

enum class CorrectorMethod { sweeping, time_marching };

struct CorrectorOptions {
  double delta = 1e-2;
  double p_shift = 0.0;
  /// Domain [-half_width, half_width].
  double half_width = 200.0;
  double dx = 0.02;
  CorrectorMethod method = CorrectorMethod::sweeping;
  /// Stop when the residual drops below tolerance * delta, or when a sweep
  /// leaves every value unchanged (fixed point to rounding).
  double tolerance = 1e-10;
  int max_iterations = 200000;
  /// time_marching only.
  double cfl = 0.9;
};

/// Discrete approximate corrector on a grid:
///   delta v_i + max(H_i^+(p + D^- v_i), H_i^-(p + D^+ v_i)) = 0,
/// with the outflow closure H^-(D^+) at the left end and H^+(D^-) at the right end.
struct CorrectorResult {
  double delta = 0.0;
  double p_shift = 0.0;
  Grid1D grid{};
  std::vector<double> values;
  /// E = sup |H(p, .)| over the grid; |delta v| <= E.
  double barrier = 0.0;
  bool barrier_ok = true;
  double residual = 0.0;
  int iterations = 0;
  double lipschitz = 0.0;

  double value_at(double y) const;
  /// vbar(z) = delta v(z / delta) on the rescaled grid.
  std::vector<double> rescaled_positions() const;
  std::vector<double> rescaled_values() const;
  /// sup over |y| <= radius / delta of |delta v(y) + target|.
  double deviation(double radius, double target) const;
};

CorrectorResult corrector_solve(const AssembledHamiltonian& h, const CorrectorOptions& opts);

struct CorrectorSlopeReport {
  /// Least-squares slopes of v on [fit_lo, fit_hi] and [-fit_hi, -fit_lo].
  double right_slope = 0.0;
  double left_slope = 0.0;
  bool fitted = false;
  double fit_lo = 0.0;
  double fit_hi = 0.0;
  /// Admissible slope intervals: [pbar_R^+, phat_R^+] and [phat_L^-, pbar_L^-].
  double right_lo = 0.0;
  double right_hi = 0.0;
  double left_lo = 0.0;
  double left_hi = 0.0;
  double tolerance = 0.05;
  bool right_ok = false;
  bool left_ok = false;
  /// Smallest C with v(y + h) - v(y) >= pbar_R^+ h - C on the right fit window (gamma = 0).
  double control_constant = 0.0;
  /// delta v(0) + Abar.
  double center_offset = 0.0;
};

CorrectorSlopeReport corrector_slopes(const CorrectorResult& result, double a_bar, const EffectiveHamiltonian& left,
                                      const EffectiveHamiltonian& right, double fit_lo, double fit_hi,
                                      double tolerance = 0.05);

/// Admissible right slopes [pbar_R^+, phat_R^+] for a limiter value.
std::pair<double, double> right_slope_interval(const EffectiveHamiltonian& right, double a_bar);
/// Admissible left slopes [phat_L^-, pbar_L^-].
std::pair<double, double> left_slope_interval(const EffectiveHamiltonian& left, double a_bar);

}  // namespace hjlab
