#include "config.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace hjlab::cli {

using nlohmann::json;

namespace {

// Strict view of one JSON object: every key must be consumed before finish().
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_ + ": expected an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  const json& at(const std::string& key) {
    seen_.insert(key);
    return j_.at(key);
  }

  std::string sub(const std::string& key) const { return path_ + "." + key; }

  void get(const std::string& key, double& out) {
    if (!has(key)) return;
    const json& v = at(key);
    if (!v.is_number()) throw ConfigError(sub(key) + ": expected a number");
    out = v.get<double>();
  }

  void get(const std::string& key, int& out) {
    if (!has(key)) return;
    const json& v = at(key);
    if (!v.is_number_integer()) throw ConfigError(sub(key) + ": expected an integer");
    out = v.get<int>();
  }

  void get(const std::string& key, std::size_t& out) {
    if (!has(key)) return;
    const json& v = at(key);
    if (!v.is_number_unsigned()) throw ConfigError(sub(key) + ": expected a non-negative integer");
    out = v.get<std::size_t>();
  }

  void get(const std::string& key, std::string& out) {
    if (!has(key)) return;
    const json& v = at(key);
    if (!v.is_string()) throw ConfigError(sub(key) + ": expected a string");
    out = v.get<std::string>();
  }

  void get(const std::string& key, std::vector<double>& out) {
    if (!has(key)) return;
    const json& v = at(key);
    if (!v.is_array()) throw ConfigError(sub(key) + ": expected an array of numbers");
    out.clear();
    for (const auto& x : v) {
      if (!x.is_number()) throw ConfigError(sub(key) + ": expected an array of numbers");
      out.push_back(x.get<double>());
    }
  }

  void get(const std::string& key, std::vector<std::uint64_t>& out) {
    if (!has(key)) return;
    const json& v = at(key);
    if (!v.is_array()) throw ConfigError(sub(key) + ": expected an array of seeds");
    out.clear();
    for (const auto& x : v) {
      if (!x.is_number_unsigned()) throw ConfigError(sub(key) + ": seeds must be non-negative integers");
      out.push_back(x.get<std::uint64_t>());
    }
  }

  void get(const std::string& key, std::optional<double>& out) {
    if (!has(key)) return;
    double v = 0.0;
    get(key, v);
    out = v;
  }

  void finish() const {
    for (const auto& [k, v] : j_.items())
      if (!seen_.count(k)) throw ConfigError(path_ + ": unknown key \"" + k + "\"");
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

template <class E>
E pick(const std::string& path, const std::string& value, std::initializer_list<std::pair<const char*, E>> options) {
  std::string names;
  for (const auto& [name, e] : options) {
    if (value == name) return e;
    names += names.empty() ? name : std::string(", ") + name;
  }
  throw ConfigError(path + ": \"" + value + "\" is not one of {" + names + "}");
}

BumpProfile parse_bump(const json& j, const std::string& path, BumpProfile b) {
  if (j.is_string()) {
    if (j.get<std::string>() != "wide") throw ConfigError(path + ": only the preset \"wide\" is known");
    return BumpProfile::wide(b.depth);
  }
  Reader r(j, path);
  if (r.has("preset")) {
    std::string preset;
    r.get("preset", preset);
    if (preset != "wide") throw ConfigError(r.sub("preset") + ": only the preset \"wide\" is known");
    b = BumpProfile::wide(b.depth);
  }
  r.get("plateau_half_width", b.plateau_half_width);
  r.get("support_half_width", b.support_half_width);
  r.get("depth", b.depth);
  r.get("smoothstep_degree", b.smoothstep_degree);
  r.finish();
  return b;
}

MarkDistribution parse_marks(const json& j, const std::string& path, MarkDistribution m) {
  Reader r(j, path);
  std::string kind;
  r.get("kind", kind);
  if (!kind.empty())
    m.kind = pick<MarkDistribution::Kind>(r.sub("kind"), kind,
                                          {{"deterministic", MarkDistribution::Kind::deterministic},
                                           {"bernoulli", MarkDistribution::Kind::bernoulli},
                                           {"uniform", MarkDistribution::Kind::uniform}});
  r.get("q", m.q);
  r.get("lo", m.lo);
  r.get("hi", m.hi);
  r.finish();
  return m;
}

CoreHamiltonian parse_core(const json& j, const std::string& path) {
  Reader r(j, path);
  std::string kind = "traffic";
  r.get("kind", kind);
  if (kind == "abs") {
    r.finish();
    return CoreHamiltonian::absolute();
  }
  if (kind == "quadratic") {
    double c = 0.0;
    r.get("c", c);
    r.finish();
    return CoreHamiltonian::quadratic(c);
  }
  if (kind != "traffic") throw ConfigError(r.sub("kind") + ": \"" + kind + "\" is not one of {traffic, abs, quadratic}");
  if (r.has("velocity")) {
    const json& v = r.at("velocity");
    if (!v.is_array()) throw ConfigError(r.sub("velocity") + ": expected [[headway, speed], ...]");
    std::vector<std::pair<double, double>> bp;
    for (const auto& e : v) {
      if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
        throw ConfigError(r.sub("velocity") + ": expected [[headway, speed], ...]");
      bp.emplace_back(e[0].get<double>(), e[1].get<double>());
    }
    r.finish();
    return CoreHamiltonian::traffic(VelocityCurve(bp));
  }
  double h0 = 1.0, vmax = 1.0;
  r.get("h0", h0);
  r.get("vmax", vmax);
  r.finish();
  return CoreHamiltonian::traffic(VelocityCurve::clamped_linear(h0, vmax));
}

PieceSpec parse_piece(const json& j, const std::string& path, PieceSpec p) {
  Reader r(j, path);
  if (r.has("core")) p.core = parse_core(r.at("core"), r.sub("core"));
  if (r.has("medium")) {
    Reader m(r.at("medium"), r.sub("medium"));
    if (m.has("marks")) p.medium.marks = parse_marks(m.at("marks"), m.sub("marks"), p.medium.marks);
    if (m.has("bump")) p.medium.bump = parse_bump(m.at("bump"), m.sub("bump"), p.medium.bump);
    m.get("lattice_spacing", p.medium.lattice_spacing);
    m.get("base_level", p.medium.base_level);
    m.finish();
  }
  r.finish();
  return p;
}

std::vector<std::uint64_t> parse_seeds(Reader& r, std::vector<std::uint64_t> seeds) {
  if (r.has("seeds") && r.has("seed_count"))
    throw ConfigError(r.sub("seeds") + ": give either seeds or seed_count, not both");
  r.get("seeds", seeds);
  if (r.has("seed_count")) {
    std::size_t n = 0;
    r.get("seed_count", n);
    seeds.clear();
    for (std::size_t i = 1; i <= n; ++i) seeds.push_back(i);
  }
  return seeds;
}

std::vector<double> parse_points(Reader& r, const std::string& key) {
  const json& v = r.at(key);
  if (v.is_array()) {
    std::vector<double> out;
    r.get(key, out);
    return out;
  }
  Reader g(v, r.sub(key));
  double from = 0.0, to = 0.0, step = 0.0;
  g.get("from", from);
  g.get("to", to);
  g.get("step", step);
  g.finish();
  if (!(step > 0.0) || !(to >= from)) throw ConfigError(r.sub(key) + ": need step > 0 and to >= from");
  std::vector<double> out;
  const auto n = static_cast<long>(std::floor((to - from) / step + 1e-9));
  for (long i = 0; i <= n; ++i) out.push_back(from + step * static_cast<double>(i));
  return out;
}

void parse_study(const json& j, const std::string& path, std::optional<StudyConfig>& out,
                 const std::optional<EnvironmentSpec>& env, const std::optional<std::vector<std::uint64_t>>& seeds) {
  Reader r(j, path);
  std::string kind_name;
  r.get("kind", kind_name);
  const auto kind = parse_study_kind(kind_name);
  if (!kind)
    throw ConfigError(r.sub("kind") + ": \"" + kind_name +
                      "\" is not one of {slope_convergence, fluctuations, flux_limiter, corrector, homogenization}");
  StudyConfig c = StudyConfig::defaults(*kind);
  if (env) c.environment = *env;
  if (seeds) c.seeds = *seeds;
  switch (*kind) {
    case StudyKind::slope_convergence:
      r.get("mu", c.slope.mu);
      r.get("t_ladder", c.slope.t_ladder);
      r.get("max_relative_spread", c.slope.max_relative_spread);
      r.get("exponent_lo", c.slope.exponent_lo);
      r.get("exponent_hi", c.slope.exponent_hi);
      r.get("junction_tolerance", c.slope.junction_tolerance);
      break;
    case StudyKind::fluctuations:
      r.get("mu_levels", c.fluctuations.mu_levels);
      r.get("distances", c.fluctuations.distances);
      r.get("exponent_lo", c.fluctuations.exponent_lo);
      r.get("exponent_hi", c.fluctuations.exponent_hi);
      break;
    case StudyKind::flux_limiter:
      r.get("window", c.flux.window);
      r.get("epsilons", c.flux.epsilons);
      r.get("tolerance", c.flux.tolerance);
      r.get("success_fraction", c.flux.success_fraction);
      r.get("atom_tolerance", c.flux.atom_tolerance);
      break;
    case StudyKind::corrector:
      r.get("deltas", c.corrector.deltas);
      r.get("radius", c.corrector.radius);
      r.get("slope_radius", c.corrector.slope_radius);
      r.get("fit_offset", c.corrector.fit_offset);
      r.get("dx", c.corrector.dx);
      r.get("domain_factor", c.corrector.domain_factor);
      r.get("min_half_width", c.corrector.min_half_width);
      r.get("monotone_prefix", c.corrector.monotone_prefix);
      r.get("deviation_delta", c.corrector.deviation_delta);
      r.get("deviation_tolerance", c.corrector.deviation_tolerance);
      r.get("slope_tolerance", c.corrector.slope_tolerance);
      r.get("limiter_window", c.corrector.limiter_window);
      r.get("limiter_tolerance", c.corrector.limiter_tolerance);
      r.get("effective_window", c.corrector.effective_window);
      r.get("effective_seeds", c.corrector.effective_seeds);
      break;
    case StudyKind::homogenization:
      r.get("epsilons", c.homogenization.epsilons);
      r.get("u0_slope", c.homogenization.u0_slope);
      r.get("compact_half_width", c.homogenization.compact_half_width);
      r.get("t_final", c.homogenization.t_final);
      r.get("domain_half_width", c.homogenization.domain_half_width);
      r.get("dx_factor", c.homogenization.dx_factor);
      r.get("cfl", c.homogenization.cfl);
      r.get("outputs", c.homogenization.outputs);
      r.get("error_tolerance", c.homogenization.error_tolerance);
      r.get("effective_window", c.homogenization.effective_window);
      r.get("effective_seeds", c.homogenization.effective_seeds);
      break;
  }
  r.finish();
  out = c;
}

}  // namespace

EnvironmentSpec parse_environment(const json& j, EnvironmentSpec e) {
  const std::string path = "environment";
  Reader r(j, path);
  if (r.has("preset")) {
    std::string preset;
    r.get("preset", preset);
    if (preset == "stationary")
      e = stationary_environment();
    else if (preset == "wfl")
      e = wfl_environment();
    else if (preset == "eps")
      e = eps_environment();
    else if (preset == "counterexample")
      e = counterexample_environment();
    else
      throw ConfigError(r.sub("preset") + ": \"" + preset + "\" is not one of {stationary, wfl, eps, counterexample}");
  }
  std::string mode;
  r.get("mode", mode);
  if (!mode.empty())
    e.mode = pick<JunctionMode>(r.sub("mode"), mode,
                                {{"none", JunctionMode::none},
                                 {"wfl", JunctionMode::wfl},
                                 {"eps", JunctionMode::eps},
                                 {"fixed_bump", JunctionMode::fixed_bump}});
  if (r.has("left")) e.left = parse_piece(r.at("left"), r.sub("left"), e.left);
  if (r.has("right")) {
    const json& rj = r.at("right");
    if (rj.is_null())
      e.right.reset();
    else
      e.right = parse_piece(rj, r.sub("right"), e.right.value_or(e.left));
  }
  r.get("epsilon", e.epsilon);
  r.get("middle_scale", e.middle_scale);
  r.get("cutoff_degree", e.cutoff_degree);
  if (r.has("junction_bump"))
    e.junction_bump = parse_bump(r.at("junction_bump"), r.sub("junction_bump"),
                                 e.junction_bump.value_or(e.left.medium.bump));
  r.finish();
  e.validate();
  return e;
}

RunConfig parse_config(const json& doc) {
  RunConfig c;
  Reader r(doc, "config");
  std::optional<EnvironmentSpec> env;
  if (r.has("environment")) env = parse_environment(r.at("environment"));
  if (env) c.environment = *env;
  std::optional<std::vector<std::uint64_t>> seeds;
  if (r.has("seeds") || r.has("seed_count")) seeds = parse_seeds(r, {});
  if (seeds) c.seeds = *seeds;
  if (c.seeds.empty()) throw ConfigError("config.seeds: need at least one seed");
  if (r.has("threads")) {
    std::size_t t = 1;
    r.get("threads", t);
    if (t < 1) throw ConfigError("config.threads: must be at least 1");
    c.threads = static_cast<unsigned>(t);
  }

  if (r.has("probe")) {
    Reader p(r.at("probe"), "config.probe");
    p.get("y_min", c.probe.y_min);
    p.get("y_max", c.probe.y_max);
    p.get("dy", c.probe.dy);
    p.get("p", c.probe.p);
    p.finish();
    if (!(c.probe.dy > 0.0) || !(c.probe.y_max >= c.probe.y_min))
      throw ConfigError("config.probe: need dy > 0 and y_max >= y_min");
  }

  if (r.has("metric")) {
    Reader m(r.at("metric"), "config.metric");
    m.get("mu", c.metric.mu);
    m.get("base", c.metric.base);
    if (m.has("y")) c.metric.y = parse_points(m, "y");
    m.get("oracle_dx", c.metric.oracle_dx);
    m.finish();
  }
  if (c.metric.y.empty())
    for (int i = -100; i <= 100; ++i) c.metric.y.push_back(c.metric.base + 0.5 * i);

  if (r.has("effective")) {
    Reader m(r.at("effective"), "config.effective");
    std::string role;
    m.get("role", role);
    if (!role.empty())
      c.effective.role = pick<PieceRole>(m.sub("role"), role,
                                         {{"left", PieceRole::left}, {"right", PieceRole::right},
                                          {"middle", PieceRole::middle}});
    m.get("window", c.effective.options.window);
    m.get("mu_levels", c.effective.options.mu_levels);
    m.get("seeds", c.effective.seeds);
    m.finish();
  }

  if (r.has("flux_limiter")) {
    Reader m(r.at("flux_limiter"), "config.flux_limiter");
    m.get("window", c.flux.window);
    m.get("tolerance", c.flux.tolerance);
    m.finish();
  }

  if (r.has("corrector")) {
    Reader m(r.at("corrector"), "config.corrector");
    m.get("delta", c.corrector.delta);
    m.get("p_shift", c.corrector.p_shift);
    m.get("half_width", c.corrector.half_width);
    m.get("dx", c.corrector.dx);
    std::string method;
    m.get("method", method);
    if (!method.empty())
      c.corrector.method = pick<CorrectorMethod>(m.sub("method"), method,
                                                 {{"sweeping", CorrectorMethod::sweeping},
                                                  {"time_marching", CorrectorMethod::time_marching}});
    m.get("tolerance", c.corrector.tolerance);
    m.get("max_iterations", c.corrector.max_iterations);
    m.get("cfl", c.corrector.cfl);
    m.finish();
  }

  if (r.has("solve")) {
    auto& s = c.solve;
    Reader m(r.at("solve"), "config.solve");
    m.get("epsilon", s.epsilon);
    m.get("t_final", s.t_final);
    m.get("x_min", s.grid.x_min);
    m.get("x_max", s.grid.x_max);
    m.get("dx", s.grid.dx);
    m.get("cfl", s.solver.cfl);
    std::string scheme;
    m.get("scheme", scheme);
    if (!scheme.empty())
      s.solver.scheme = pick<Scheme>(m.sub("scheme"), scheme,
                                     {{"godunov", Scheme::godunov}, {"lax_friedrichs", Scheme::lax_friedrichs}});
    m.get("output_times", s.solver.output_times);
    m.get("dt", s.solver.dt);
    if (m.has("u0")) {
      Reader u(m.at("u0"), "config.solve.u0");
      if (u.has("breakpoints")) {
        const json& b = u.at("breakpoints");
        if (!b.is_array() || b.empty()) throw ConfigError("config.solve.u0.breakpoints: expected [[x, u], ...]");
        s.u0_breakpoints.clear();
        for (const auto& e : b) {
          if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
            throw ConfigError("config.solve.u0.breakpoints: expected [[x, u], ...]");
          s.u0_breakpoints.emplace_back(e[0].get<double>(), e[1].get<double>());
        }
      }
      u.get("left_slope", s.u0_left_slope);
      u.get("right_slope", s.u0_right_slope);
      u.finish();
    }
    if (m.has("limit")) {
      Reader l(m.at("limit"), "config.solve.limit");
      std::string kind;
      l.get("kind", kind);
      if (!kind.empty())
        s.limit.kind = pick<LimitConfig::Kind>(l.sub("kind"), kind,
                                               {{"abs", LimitConfig::Kind::abs},
                                                {"core", LimitConfig::Kind::core},
                                                {"homogenized", LimitConfig::Kind::homogenized}});
      l.get("a_bar", s.limit.a_bar);
      l.get("window", s.limit.window);
      l.get("seeds", s.limit.seeds);
      l.finish();
    }
    m.finish();
  }

  if (r.has("study")) parse_study(r.at("study"), "config.study", c.study, env, seeds);
  r.finish();
  if (c.study) {
    c.study->threads = c.threads;
    c.study->validate();
  }

  c.canonical = doc;
  c.canonical.erase("threads");
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config file \"" + path + "\" is not readable");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config file \"" + path + "\" is not valid JSON: " + e.what());
  }
  return parse_config(doc);
}

std::string config_hash(const json& canonical) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : canonical.dump()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace hjlab::cli
