#pragma once

#include <optional>
#include <utility>
#include <vector>

namespace hjlab {

enum class Side { plus, minus };

/// Piecewise-linear speed-headway curve V(h): zero up to the jam headway h0,
/// linear between breakpoints, constant vmax after the last one.
class VelocityCurve {
 public:
  /// breakpoints: (headway, speed) pairs, strictly increasing in headway; the
  /// first must be (h0, 0) and the last carries vmax > 0.
  explicit VelocityCurve(std::vector<std::pair<double, double>> breakpoints);

  /// V(h) = clamp(h - h0, 0, vmax).
  static VelocityCurve clamped_linear(double h0, double vmax);

  double operator()(double h) const;
  double h0() const { return breakpoints_.front().first; }
  double vmax() const { return breakpoints_.back().second; }
  const std::vector<std::pair<double, double>>& breakpoints() const { return breakpoints_; }

  /// Minimizer of p -> p V(-1/p) on [-1/h0, 0); validated unimodal at construction.
  double p_tilde() const { return p_tilde_; }

  friend bool operator==(const VelocityCurve& a, const VelocityCurve& b) {
    return a.breakpoints_ == b.breakpoints_;
  }

 private:
  std::vector<std::pair<double, double>> breakpoints_;
  double p_tilde_ = 0.0;
};

/// Growth envelope -c0 |p + gamma| <= H(p) <= C0 |p + gamma|.
struct GrowthBounds {
  double c0;
  double C0;
  double gamma;
};

/// Stationary, y-independent core of a Hamiltonian: convex, coercive,
/// minimized at p = 0.
class CoreHamiltonian {
 public:
  enum class Kind { traffic, abs, quadratic };

  /// Traffic-flow Hamiltonian
  ///   H*(p) = -p - p~ - k0             p < -k0 - p~
  ///         = -|p + p~| V(-1/(p + p~))  -k0 - p~ <= p <= -p~
  ///         = p + p~                   p > -p~
  /// with k0 = 1/h0 and p~ the minimizer of p V(-1/p).
  static CoreHamiltonian traffic(VelocityCurve velocity);
  static CoreHamiltonian traffic_default() { return traffic(VelocityCurve::clamped_linear(1.0, 1.0)); }
  static CoreHamiltonian absolute();
  /// H(p) = p^2 + c.
  static CoreHamiltonian quadratic(double c);

  double operator()(double p) const;
  double minimum() const { return (*this)(0.0); }

  /// plus: max{p : H(p) <= level} >= 0; minus: min{p : H(p) <= level} <= 0.
  /// Throws LevelBelowMinimum when level < H(0).
  double branch(double level, Side side) const;

  /// sup |H'(p)| over |p| <= radius.
  double lipschitz(double radius) const;

  std::optional<GrowthBounds> growth_bounds() const;

  Kind kind() const { return kind_; }
  const std::optional<VelocityCurve>& velocity() const { return velocity_; }
  double p_tilde() const { return p_tilde_; }
  double k0() const { return k0_; }
  double offset() const { return c_; }
  /// Kink locations in p, ascending (empty for quadratic).
  const std::vector<double>& knots() const { return knots_p_; }

  friend bool operator==(const CoreHamiltonian& a, const CoreHamiltonian& b) {
    return a.kind_ == b.kind_ && a.velocity_ == b.velocity_ && a.c_ == b.c_;
  }

 private:
  CoreHamiltonian() = default;
  void build_knots();

  Kind kind_ = Kind::abs;
  std::optional<VelocityCurve> velocity_;
  double p_tilde_ = 0.0;
  double k0_ = 0.0;
  double c_ = 0.0;
  // piecewise-linear representation (traffic, abs); includes p = 0
  std::vector<double> knots_p_;
  std::vector<double> knots_h_;
  double left_slope_ = -1.0;
  double right_slope_ = 1.0;
};

/// Non-decreasing (plus) or non-increasing (minus) part of a convex function
/// minimized at 0: plus gives h(max(p, 0)), minus gives h(min(p, 0)).
template <class F>
double monotone_part(const F& h, double p, Side side) {
  if (side == Side::plus) return h(p > 0.0 ? p : 0.0);
  return h(p < 0.0 ? p : 0.0);
}

}  // namespace hjlab
