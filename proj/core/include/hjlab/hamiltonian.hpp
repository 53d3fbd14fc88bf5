#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string_view>
#include <vector>

#include "hjlab/core_hamiltonian.hpp"
#include "hjlab/medium.hpp"

namespace hjlab {

/// Transition profiles gluing the left, middle and right Hamiltonians.
struct CutoffProfile {
  enum class Kind { wfl_phi, eps_psi1 };
  Kind kind = Kind::wfl_phi;
  double epsilon = 0.1;
  int degree = 5;

  /// wfl_phi: 1 on (-inf, -1], 0 on [1, inf), non-increasing.
  static CutoffProfile wfl(int degree = 5) { return {Kind::wfl_phi, 0.0, degree}; }
  /// eps_psi1: 0 on (-inf, 1/sqrt(eps)], 1 on [2/sqrt(eps), inf), non-decreasing.
  static CutoffProfile eps(double epsilon, int degree = 5) { return {Kind::eps_psi1, epsilon, degree}; }

  double operator()(double y) const;
  /// Interval outside of which the profile is locally constant.
  std::pair<double, double> transition() const;
};

enum class JunctionMode { none, wfl, eps, fixed_bump };
enum class PieceRole { left, right, middle };

std::string_view to_string(JunctionMode mode);

/// H_alpha(p, y, omega) = core(p) psi(y, omega).
struct HamiltonianPiece {
  CoreHamiltonian core;
  RandomMedium medium;
};

/// Hamiltonian frozen at one point y: sum_k w_k H*_k(p) with w_k >= 0 except in
/// fixed_bump mode. Holds pointers into the AssembledHamiltonian it came from,
/// which must outlive it.
class LocalHamiltonian {
 public:
  struct Term {
    double weight;
    const CoreHamiltonian* core;
  };

  LocalHamiltonian() = default;

  double operator()(double p) const;
  double plus(double p) const { return (*this)(p > 0.0 ? p : 0.0); }
  double minus(double p) const { return (*this)(p < 0.0 ? p : 0.0); }
  double at_zero() const { return (*this)(0.0); }
  /// plus: max{p : H(p) <= mu}; minus: min{p : H(p) <= mu}.
  double branch(double mu, Side side) const;
  double lipschitz(double radius) const;
  bool convex() const { return convex_; }

 private:
  friend class AssembledHamiltonian;
  void add(double weight, const CoreHamiltonian* core);

  std::array<Term, 3> terms_{};
  int count_ = 0;
  bool reversed_ = false;
  bool convex_ = true;
};

/// Full perturbed Hamiltonian H(p, y, omega) assembled from stationary pieces.
///   none:       H = H_L
///   wfl:        H = phi(y) H_L + (1 - phi(y)) H_R
///   eps:        H = psi1(-y) H_L + C H_L (1 - psi1(-y))(1 - psi1(y)) + psi1(y) H_R, H_L = H_R
///   fixed_bump: H = H_L bump(y)   (non-scaling counterexample; not convex)
/// Immutable; copies share the underlying cores.
class AssembledHamiltonian {
 public:
  static AssembledHamiltonian stationary(HamiltonianPiece piece, double scale = 1.0);
  static AssembledHamiltonian wfl(HamiltonianPiece left, HamiltonianPiece right, int degree = 5);
  /// middle_scale C in (0, 1]; H_0 = C H_L is checked to dominate H_L on
  /// sampled points where H_L <= 0.
  static AssembledHamiltonian eps(HamiltonianPiece piece, double epsilon, double middle_scale,
                                  int degree = 5);
  static AssembledHamiltonian fixed_bump(HamiltonianPiece piece, BumpProfile junction_bump);

  double operator()(double p, double y) const { return local(y)(p); }
  double at_zero(double y) const { return local(y).at_zero(); }
  LocalHamiltonian local(double y) const;
  /// Root branch p^+-(y, mu); throws LevelBelowMinimum if mu < H(0, y).
  double branch(double y, double mu, Side side) const { return local(y).branch(mu, side); }
  double monotone_part(double p, double y, Side side) const;

  /// G(p, y) = H(-p, y).
  AssembledHamiltonian reversed() const;
  /// Stationary Hamiltonian of one piece (mode none); middle is C H_L in eps mode.
  AssembledHamiltonian stationary_piece(PieceRole role) const;

  void append_breakpoints(double a, double b, std::vector<double>& out) const;
  /// True when H(p, ., omega) is independent of y on [a, b] (no breakpoint inside).
  bool constant_on(double a, double b) const;

  /// Bound on |dH/dp| over all y and |p| <= radius.
  double lipschitz(double radius) const;
  std::optional<GrowthBounds> growth_bounds() const;
  /// H coincides with H_L for y <= -r and with H_R for y >= r.
  double junction_radius() const;

  JunctionMode mode() const { return mode_; }
  bool is_reversed() const { return reversed_; }
  double epsilon() const { return cutoff_.epsilon; }
  double middle_scale() const { return middle_scale_; }
  const HamiltonianPiece& left() const { return *left_; }
  const HamiltonianPiece& right() const { return *right_; }
  bool shared_pieces() const { return left_ == right_; }

 private:
  AssembledHamiltonian() = default;

  std::shared_ptr<const HamiltonianPiece> left_;
  std::shared_ptr<const HamiltonianPiece> right_;
  bool same_core_ = false;
  JunctionMode mode_ = JunctionMode::none;
  CutoffProfile cutoff_{};
  double middle_scale_ = 1.0;
  double scale_ = 1.0;
  BumpProfile junction_bump_{};
  bool reversed_ = false;
};

/// Recipe for building one realization per seed.
struct PieceSpec {
  CoreHamiltonian core = CoreHamiltonian::traffic_default();
  MediumParams medium{};
};

struct EnvironmentSpec {
  JunctionMode mode = JunctionMode::wfl;
  PieceSpec left{};
  /// Absent: the right piece shares the left core and medium.
  std::optional<PieceSpec> right{};
  double epsilon = 0.1;
  double middle_scale = 0.5;
  int cutoff_degree = 5;
  /// fixed_bump only; defaults to the left medium's bump when absent.
  std::optional<BumpProfile> junction_bump{};

  void validate() const;
  /// Left medium uses stream 0, an independent right medium stream 1.
  AssembledHamiltonian build(std::uint64_t seed) const;
  HamiltonianPiece piece(PieceRole role, std::uint64_t seed) const;
};

}  // namespace hjlab
