#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "hjlab/hamiltonian.hpp"
#include "hjlab/table.hpp"

namespace hjlab {

enum class StudyKind { slope_convergence, fluctuations, flux_limiter, corrector, homogenization };

std::string_view to_string(StudyKind kind);
std::optional<StudyKind> parse_study_kind(std::string_view name);

struct SlopeStudyParams {
  double mu = 0.5;
  std::vector<double> t_ladder{100.0, 300.0, 1000.0, 3000.0, 10000.0};
  double max_relative_spread = 0.05;
  double exponent_lo = 0.35;
  double exponent_hi = 0.65;
  /// Allowed gap between junction slopes and stationary-piece slopes at the largest t.
  double junction_tolerance = 1e-2;
};

struct FluctuationStudyParams {
  std::vector<double> mu_levels{-0.2, -0.1, -0.05};
  std::vector<double> distances{16.0, 32.0, 64.0, 128.0, 256.0, 512.0, 1024.0};
  double exponent_lo = 0.35;
  double exponent_hi = 0.65;
};

struct FluxLimiterStudyParams {
  double window = 1e4;
  /// eps regime only: the environment's epsilon is replaced by each entry.
  std::vector<double> epsilons{0.2, 0.1, 0.05};
  double tolerance = 0.02;
  /// wfl regime: required fraction of seeds within tolerance.
  double success_fraction = 0.95;
  /// Counterexample: values closer than this are the same atom.
  double atom_tolerance = 1e-9;
};

struct CorrectorStudyParams {
  std::vector<double> deltas{1e-1, 3e-2, 1e-2, 1e-3};
  /// Radius r of B_{r/delta} for the deviation sup.
  double radius = 0.01;
  /// Slope fit window [2/sqrt(eps) + fit_offset, slope_radius / delta].
  double slope_radius = 0.05;
  double fit_offset = 5.0;
  double dx = 0.02;
  /// Domain half-width max(domain_factor * max(radius, slope_radius) / delta, min_half_width).
  double domain_factor = 2.0;
  double min_half_width = 50.0;
  /// Number of leading deltas along which the deviation must decrease.
  std::size_t monotone_prefix = 3;
  double deviation_delta = 1e-2;
  double deviation_tolerance = 0.05;
  double slope_tolerance = 0.05;
  /// Window used to decide whether a seed lies in the success event (A~ close to Abar).
  double limiter_window = 1e4;
  double limiter_tolerance = 0.02;
  double effective_window = 2000.0;
  std::vector<std::uint64_t> effective_seeds{1, 2, 3, 4, 5, 6, 7, 8};
};

struct HomogenizationStudyParams {
  std::vector<double> epsilons{0.2, 0.1, 0.05};
  /// u0(x) = slope |x|.
  double u0_slope = -0.3;
  double compact_half_width = 2.0;
  double t_final = 1.0;
  double domain_half_width = 4.0;
  /// dx = epsilon * dx_factor.
  double dx_factor = 0.05;
  double cfl = 0.5;
  int outputs = 10;
  double error_tolerance = 0.1;
  double effective_window = 2000.0;
  std::vector<std::uint64_t> effective_seeds{1, 2, 3, 4, 5, 6, 7, 8};
};

struct StudyConfig {
  StudyKind kind = StudyKind::slope_convergence;
  EnvironmentSpec environment{};
  std::vector<std::uint64_t> seeds{};
  unsigned threads = 1;
  SlopeStudyParams slope{};
  FluctuationStudyParams fluctuations{};
  FluxLimiterStudyParams flux{};
  CorrectorStudyParams corrector{};
  HomogenizationStudyParams homogenization{};

  /// Kind-specific environment and seed count (seeds 1..n).
  static StudyConfig defaults(StudyKind kind);
  void validate() const;
};

/// Default media for the studies.
EnvironmentSpec stationary_environment();
EnvironmentSpec wfl_environment(double right_depth = -0.3);
EnvironmentSpec eps_environment(double epsilon = 0.1, double middle_scale = 0.5);
/// Non-scaling junction bump with the wide bump profile and P(X = 0) = p0.
EnvironmentSpec counterexample_environment(double p0 = 0.3, double depth = -0.4);

/// Closed-form limiter of the counterexample given the mark at cell 0:
///   H*(0) depth_j (base + depth_m X0).
double counterexample_value(const EnvironmentSpec& spec, double mark0);

struct StudyCheck {
  std::string name;
  double value;
  double target;
  bool pass;
  std::string detail;
};

struct StudyReport {
  StudyKind kind;
  Table raw;
  Table summary;
  std::vector<StudyCheck> checks;

  bool all_pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const StudyCheck& c) { return c.pass; });
  }
};

/// Per-seed rows, sorted by (seed, ladder parameter).
Table study_raw(const StudyConfig& cfg);
/// Statistics and checks as a pure function of the raw rows.
StudyReport summarize(const StudyConfig& cfg, const Table& raw);
StudyReport run_study(const StudyConfig& cfg);

std::string checks_to_csv(const std::vector<StudyCheck>& checks);

/// Runs f(0..n-1) on up to `threads` workers; results come back in index order
/// and the first failing index's exception is rethrown.
template <class T, class F>
std::vector<T> parallel_map(std::size_t n, unsigned threads, F&& f) {
  std::vector<std::optional<T>> out(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  const auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        out[i].emplace(f(i));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const unsigned k = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n)));
  if (k == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < k; ++t) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  std::vector<T> res;
  res.reserve(n);
  for (auto& o : out) res.push_back(std::move(*o));
  return res;
}

}  // namespace hjlab
