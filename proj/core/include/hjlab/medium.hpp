#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace hjlab {

/// Polynomial smoothstep S on [0, 1] with S(0)=0, S(1)=1, clamped outside.
/// Degree 3 is C1, degree 5 is C2, degree 7 is C3.
double smoothstep(double t, int degree);
double smoothstep_derivative(double t, int degree);
bool valid_smoothstep_degree(int degree);

/// Radial bump: depth on the plateau |y| <= plateau, zero beyond the
/// support, monotone smoothstep transition between.
struct BumpProfile {
  double plateau_half_width = 0.25;
  double support_half_width = 0.45;
  double depth = -0.5;
  int smoothstep_degree = 5;

  /// Bump used by the fixed-zone counterexample: plateau 1/2, support 3/4.
  static BumpProfile wide(double depth);

  double operator()(double y) const;
  double lipschitz() const;
  void validate() const;

  friend bool operator==(const BumpProfile&, const BumpProfile&) = default;
};

struct MarkDistribution {
  enum class Kind { deterministic, bernoulli, uniform };
  Kind kind = Kind::deterministic;
  double q = 0.0;  ///< P(X = 1) for bernoulli
  double lo = 0.0;
  double hi = 1.0;

  static MarkDistribution deterministic() { return {}; }
  static MarkDistribution bernoulli(double q) { return {Kind::bernoulli, q, 0.0, 1.0}; }
  static MarkDistribution uniform(double lo, double hi) { return {Kind::uniform, 0.0, lo, hi}; }

  /// Maps a uniform variate in [0, 1) to a mark.
  double sample(double u) const;
  /// Range [min, max] of attainable marks.
  std::pair<double, double> support() const;
  void validate() const;

  friend bool operator==(const MarkDistribution&, const MarkDistribution&) = default;
};

struct MediumParams {
  MarkDistribution marks = MarkDistribution::bernoulli(0.5);
  BumpProfile bump{};
  double lattice_spacing = 2.0;
  double base_level = 1.0;

  void validate() const;
  friend bool operator==(const MediumParams&, const MediumParams&) = default;
};

/// 64-bit counter-based hash; the same input always gives the same output.
std::uint64_t mix64(std::uint64_t z);

/// One realization omega of the random medium
///   psi(y, omega) = bump(y - s k) X_k(omega) + base   on cell k,
/// with cells [s k - s/2, s k + s/2). Marks X_k are i.i.d. and addressed by
/// lattice index through a counter-based hash of (seed, stream, k), so the
/// medium has O(1) random access and no sequential state.
class RandomMedium {
 public:
  RandomMedium(std::uint64_t seed, MediumParams params, std::uint64_t stream = 0);

  double mark(std::int64_t k) const;
  double psi(double y) const;
  std::int64_t cell_index(double y) const;
  double cell_center(std::int64_t k) const { return spacing() * static_cast<double>(k); }

  /// Translation action: shifted(m).mark(k) == mark(k + m), hence
  /// psi(y + s m) == shifted(m).psi(y).
  RandomMedium shifted(std::int64_t m) const;

  /// Points in (a, b) where psi may fail to be smooth.
  void append_breakpoints(double a, double b, std::vector<double>& out) const;
  /// True when psi is constant on [a, b]; [a, b] must not straddle a breakpoint.
  bool constant_on(double a, double b) const;

  std::pair<double, double> psi_bounds() const;
  double lipschitz() const;

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }
  std::int64_t offset() const { return offset_; }
  const MediumParams& params() const { return params_; }
  double spacing() const { return params_.lattice_spacing; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t key_;
  std::int64_t offset_ = 0;
  MediumParams params_;
};

}  // namespace hjlab
