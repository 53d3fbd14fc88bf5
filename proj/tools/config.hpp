#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hjlab/corrector.hpp"
#include "hjlab/effective.hpp"
#include "hjlab/errors.hpp"
#include "hjlab/experiments.hpp"
#include "hjlab/hj_solver.hpp"

namespace hjlab::cli {

/// Malformed or unknown configuration entry; the message carries the JSON path.
class ConfigError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

struct ProbeConfig {
  double y_min = -10.0;
  double y_max = 10.0;
  double dy = 0.05;
  std::vector<double> p{-1.0, -0.5, 0.0, 0.5, 1.0};
};

struct MetricConfig {
  double mu = 0.5;
  double base = 0.0;
  std::vector<double> y{};
  /// Also run the grid oracle with this step (grid [-range, range]).
  std::optional<double> oracle_dx{};
};

struct EffectiveConfig {
  PieceRole role = PieceRole::left;
  EffectiveOptions options{};
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5, 6, 7, 8};
};

struct FluxConfig {
  double window = 1e4;
  double tolerance = 0.02;
};

struct GridConfig {
  double x_min = -4.0;
  double x_max = 4.0;
  double dx = 0.01;
};

/// Limit Hamiltonians: abs (|p| on both sides), core (H* scaled, deterministic),
/// or homogenized (seed-averaged metric slopes of the environment's pieces).
struct LimitConfig {
  enum class Kind { abs, core, homogenized };
  Kind kind = Kind::homogenized;
  std::optional<double> a_bar{};
  double window = 2000.0;
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5, 6, 7, 8};
};

struct SolveConfig {
  double epsilon = 0.1;
  double t_final = 1.0;
  GridConfig grid{};
  SolverOptions solver{};
  std::vector<std::pair<double, double>> u0_breakpoints{{0.0, 0.0}};
  double u0_left_slope = 0.0;
  double u0_right_slope = 0.0;
  LimitConfig limit{};

  InitialData initial_data() const { return InitialData(u0_breakpoints, u0_left_slope, u0_right_slope); }
};

/// Everything a run needs, parsed and validated before any compute.
struct RunConfig {
  EnvironmentSpec environment{};
  std::vector<std::uint64_t> seeds{1};
  unsigned threads = 1;
  ProbeConfig probe{};
  MetricConfig metric{};
  EffectiveConfig effective{};
  FluxConfig flux{};
  CorrectorOptions corrector{};
  SolveConfig solve{};
  std::optional<StudyConfig> study{};
  /// Canonical JSON of the input with overrides applied (threads excluded).
  nlohmann::json canonical;
};

/// Parses a configuration document. Unknown keys anywhere raise ConfigError.
RunConfig parse_config(const nlohmann::json& doc);
RunConfig load_config(const std::string& path);

EnvironmentSpec parse_environment(const nlohmann::json& j, EnvironmentSpec base = {});

/// FNV-1a 64 of the canonical (sorted-key) dump, as 16 hex digits.
std::string config_hash(const nlohmann::json& canonical);

}  // namespace hjlab::cli
