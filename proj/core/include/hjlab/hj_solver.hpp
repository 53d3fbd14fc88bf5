#pragma once

#include <algorithm>
#include <optional>
#include <utility>
#include <vector>

#include "hjlab/effective.hpp"
#include "hjlab/grid.hpp"
#include "hjlab/hamiltonian.hpp"

namespace hjlab {

enum class Scheme { godunov, lax_friedrichs };

/// Numerical Hamiltonian g(p_left, p_right) for a convex h minimized at 0.
///   godunov:         max(h^+(p_left), h^-(p_right))
///   lax_friedrichs:  (h(p_left) + h(p_right))/2 - alpha (p_right - p_left)/2, alpha >= Lip h
/// Non-decreasing in p_left, non-increasing in p_right, and g(p, p) = h(p).
template <class H>
double numerical_flux(const H& h, double p_left, double p_right, Scheme scheme = Scheme::godunov,
                      double alpha = 0.0) {
  if (scheme == Scheme::godunov) return std::max(h.plus(p_left), h.minus(p_right));
  return 0.5 * (h(p_left) + h(p_right)) - 0.5 * alpha * (p_right - p_left);
}

/// Piecewise-linear initial datum through sorted breakpoints, extended with the
/// end slopes (a single breakpoint gives a constant).
class InitialData {
 public:
  explicit InitialData(std::vector<std::pair<double, double>> breakpoints, double left_slope = 0.0,
                       double right_slope = 0.0);

  static InitialData constant(double c) { return InitialData({{0.0, c}}); }
  static InitialData affine(double p, double c = 0.0) { return InitialData({{0.0, c}}, p, p); }
  /// Breakpoints with the end slopes taken from the outer segments.
  static InitialData piecewise_linear(std::vector<std::pair<double, double>> breakpoints);

  double operator()(double x) const;
  double lipschitz() const;
  const std::vector<std::pair<double, double>>& breakpoints() const { return breakpoints_; }

 private:
  std::vector<std::pair<double, double>> breakpoints_;
  double left_slope_;
  double right_slope_;
};

struct SolverOptions {
  double cfl = 0.5;
  Scheme scheme = Scheme::godunov;
  /// Output times in (0, T]; T itself is always stored. Time 0 is stored first.
  std::vector<double> output_times{};
  /// Fixed time step (checked against the CFL bound) instead of the adaptive one.
  std::optional<double> dt{};
  /// Record every step's values in the field (memory heavy).
  bool keep_all_steps = false;
};

/// Space-time values on a grid, with scheme metadata.
struct SolutionField {
  Grid1D grid{};
  std::vector<double> times;
  std::vector<std::vector<double>> values;
  double cfl = 0.0;
  Scheme scheme = Scheme::godunov;
  std::size_t steps = 0;
  double dt_min = 0.0;
  double dt_max = 0.0;
  /// Discrete Lipschitz constant in x at each stored time.
  std::vector<double> lipschitz;
  /// Barrier |u(t) - u0| <= C t checked at every step.
  double barrier_constant = 0.0;
  double barrier_rate = 0.0;  ///< max over steps of max|u - u0| / t
  bool barrier_ok = true;

  const std::vector<double>& final_values() const { return values.back(); }
  /// Linear interpolation in x of the stored slice k.
  double value(std::size_t k, double x) const;
};

/// u_t + H(u_x, x / eps) = 0 with an explicit monotone scheme. The local
/// Hamiltonians at x_i / eps are frozen once before time stepping.
/// Throws UnresolvedScale if dx > eps / 20 and CflViolation if cfl is outside (0, 0.9].
SolutionField solve_epsilon(const InitialData& u0, double epsilon, double t_final, const AssembledHamiltonian& h,
                            const Grid1D& grid, const SolverOptions& opts = {});

/// u_t + Hbar_L(u_x) = 0 (x < 0), u_t + Hbar_R(u_x) = 0 (x > 0), and at x = 0
///   u_t + max(Abar, Hbar_L^+(u_x(0-)), Hbar_R^-(u_x(0+))) = 0.
/// The grid must contain x = 0; Abar must be at least max(min Hbar_L, min Hbar_R).
SolutionField solve_limit(const InitialData& u0, const EffectiveHamiltonian& left, const EffectiveHamiltonian& right,
                          double a_bar, double t_final, const Grid1D& grid, const SolverOptions& opts = {});

}  // namespace hjlab
