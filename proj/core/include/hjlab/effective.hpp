#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "hjlab/hamiltonian.hpp"
#include "hjlab/metric.hpp"

namespace hjlab {

/// One sublevel set {p : Hbar(p) <= mu} = [p_minus, p_plus].
struct EffectiveLevel {
  double mu;
  double p_minus;
  double p_plus;
};

/// Deterministic convex Hbar stored as nested mu-level intervals. Hbar(p) is
/// the smallest mu whose interval contains p, with linear interpolation in mu
/// between stored levels and linear extension past the last one.
class EffectiveHamiltonian {
 public:
  /// Levels must be strictly increasing in mu with nested intervals containing 0.
  explicit EffectiveHamiltonian(std::vector<EffectiveLevel> levels, double window = 0.0,
                                std::vector<std::uint64_t> seeds = {});

  /// Hbar(p) = |p| tabulated on [0, mu_max].
  static EffectiveHamiltonian absolute_value(double mu_max = 5.0, int count = 41);
  /// Hbar = scale * H* for a deterministic core (homogenization is the identity).
  static EffectiveHamiltonian from_core(const CoreHamiltonian& core, double scale = 1.0, double span = 5.0,
                                        int count = 41);

  double operator()(double p) const;
  double plus(double p) const { return (*this)(p > 0.0 ? p : 0.0); }
  double minus(double p) const { return (*this)(p < 0.0 ? p : 0.0); }
  double monotone_part(double p, Side side) const { return side == Side::plus ? plus(p) : minus(p); }
  /// mu* = min Hbar = Hbar(0), the first stored level.
  double minimum() const { return levels_.front().mu; }
  /// pbar^{+-}_mu, interpolated; LevelBelowMinimum below the first level.
  double level_set(double mu, Side side) const;
  /// Largest |Hbar'| on the table and its extension.
  double lipschitz() const;
  /// Largest midpoint-convexity defect on the tabulated range.
  double convexity_defect() const;

  const std::vector<EffectiveLevel>& levels() const { return levels_; }
  double window() const { return window_; }
  const std::vector<std::uint64_t>& seeds() const { return seeds_; }

 private:
  double evaluate_side(double p, Side side) const;

  std::vector<EffectiveLevel> levels_;
  double window_;
  std::vector<std::uint64_t> seeds_;
};

struct SlopePair {
  double p_plus;
  double p_minus;
};

/// (m(t, 0)/t, m(-t, 0)/(-t)) for the metric problem of h at level mu.
SlopePair homogenized_slopes(const AssembledHamiltonian& h, double mu, double t, const MetricOptions& opts = {});
/// Same for several levels at once.
std::vector<SlopePair> homogenized_slopes(const AssembledHamiltonian& h, std::span<const double> mus, double t,
                                          const MetricOptions& opts = {});

/// sup of H(0, y) over [a, b], sampled on the quadrature nodes and piece ends
/// (spacing below 0.01) and polished by golden-section search near the best sample.
double window_sup_at_zero(const AssembledHamiltonian& h, double a, double b);

/// Geometric ladder mu_star + offsets, offsets from lo to hi.
std::vector<double> mu_ladder(double mu_star, double lo = 1e-3, double hi = 5.0, int count = 40);

struct EffectiveOptions {
  /// Interval [-window, window] on which the slopes are averaged.
  double window = 2000.0;
  /// Levels; empty means base level mu* + 1e-8 followed by mu_ladder(mu*).
  std::vector<double> mu_levels{};
  MetricOptions metric{};
};

/// Seed-averaged level intervals of the stationary Hamiltonians in `pieces`
/// (one realization per seed). Throws InvalidArgument when the averaged
/// intervals are not nested (window too short).
EffectiveHamiltonian build_effective(std::span<const AssembledHamiltonian> pieces,
                                     std::span<const std::uint64_t> seeds, const EffectiveOptions& opts = {});

/// Convenience: one stationary piece of `spec` per seed.
EffectiveHamiltonian build_effective(const EnvironmentSpec& spec, PieceRole role,
                                     std::span<const std::uint64_t> seeds, const EffectiveOptions& opts = {});

enum class MuStarMethod { sup_window, corrector };

struct MuStarOptions {
  /// sup_window: half-width of the window.
  double window = 1e4;
  /// corrector: discount rate, domain half-width (in units of 1/delta) and grid step.
  double delta = 1e-2;
  double corrector_radius = 2.0;
  double corrector_dx = 0.01;
};

/// mu* of a stationary Hamiltonian: window sup of H(0, .), or -delta v^delta(0).
double mu_star(const AssembledHamiltonian& stationary, MuStarMethod method, const MuStarOptions& opts = {});

struct FluxLimiterEstimate {
  JunctionMode regime;
  double epsilon;
  double window;
  std::vector<std::uint64_t> seeds;
  /// Per-seed window sup of H(0, .): A~(omega).
  std::vector<double> empirical;
  /// Per-seed window estimates of the stationary minima.
  std::vector<double> mu_star_left;
  std::vector<double> mu_star_right;
  std::vector<double> mu_star_middle;
  /// Abar from the pooled mu* estimates (max over seeds): max(mu*_L, mu*_R) for
  /// wfl, mu*_0 for eps. NaN for the fixed-zone counterexample.
  double effective;
  /// Fraction of seeds with |A~ - Abar| > tolerance |Abar|.
  double failure_rate;
  double tolerance;
};

/// Per-seed ingredients of the limiter estimate.
struct FluxLimiterSample {
  double a_tilde;
  double mu_star_left;
  double mu_star_right;
  double mu_star_middle;
};

FluxLimiterSample flux_limiter_sample(const EnvironmentSpec& spec, std::uint64_t seed, double window);

FluxLimiterEstimate flux_limiter(const EnvironmentSpec& spec, double window, std::span<const std::uint64_t> seeds,
                                 double tolerance = 0.02);

/// Abar from pooled mu* estimates for the given regime.
double effective_limiter(JunctionMode regime, double mu_star_left, double mu_star_right, double mu_star_middle);

}  // namespace hjlab
