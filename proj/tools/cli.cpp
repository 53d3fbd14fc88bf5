#include "cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>

#include <CLI11.hpp>

#include "config.hpp"
#include "hjlab/metric.hpp"
#include "hjlab/table.hpp"

namespace hjlab::cli {

namespace {

struct Flags {
  std::string config;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  bool quiet = false;
};

struct Context {
  RunConfig cfg;
  std::string hash;
  std::filesystem::path out_dir;
  bool quiet;
  std::ostream& out;
  std::ostream& err;

  std::string write(const std::string& stem, const Table& t) const {
    const auto path = out_dir / (stem + "_" + hash + ".csv");
    t.write_csv(path.string());
    if (!quiet) out << "wrote " << path.string() << " (" << t.size() << " rows)\n";
    return path.string();
  }

  void write_text(const std::string& stem, const std::string& text) const {
    const auto path = out_dir / (stem + "_" + hash + ".csv");
    std::ofstream f(path, std::ios::binary);
    if (!f) throw InvalidArgument("output file \"" + path.string() + "\" is not writable");
    f << text;
    if (!quiet) out << "wrote " << path.string() << "\n";
  }
};

std::vector<double> grid_points(double lo, double hi, double step) {
  std::vector<double> v;
  const auto n = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
  for (long i = 0; i <= n; ++i) v.push_back(lo + step * static_cast<double>(i));
  return v;
}

void env_probe(const Context& c) {
  const auto& p = c.cfg.probe;
  const std::uint64_t seed = c.cfg.seeds.front();
  const AssembledHamiltonian h = c.cfg.environment.build(seed);
  std::vector<std::string> cols{"y", "psi_left", "psi_right", "h_at_zero"};
  for (double q : p.p) cols.push_back("h_p=" + format_double(q));
  Table t(cols);
  for (double y : grid_points(p.y_min, p.y_max, p.dy)) {
    const LocalHamiltonian loc = h.local(y);
    std::vector<double> row{y, h.left().medium.psi(y), h.right().medium.psi(y), loc.at_zero()};
    for (double q : p.p) row.push_back(loc(q));
    t.add_row(row);
  }
  c.write("env_probe", t);
}

void metric(const Context& c) {
  const auto& m = c.cfg.metric;
  Table t({"seed", "y", "m", "lower", "upper", "m_oracle"});
  for (std::uint64_t seed : c.cfg.seeds) {
    const AssembledHamiltonian h = c.cfg.environment.build(seed);
    const MetricQuery q{h, m.mu, m.base};
    const MetricProfile prof = metric_profile(q, m.y);
    std::optional<MetricProfile> oracle;
    if (m.oracle_dx) {
      double reach = 0.0;
      for (double y : m.y) reach = std::max(reach, std::abs(y - m.base));
      const double half = std::ceil(reach / *m.oracle_dx - 1e-9) * *m.oracle_dx;
      oracle = metric_oracle(q, Grid1D::uniform(m.base - half, m.base + half, *m.oracle_dx));
    }
    for (std::size_t k = 0; k < prof.y.size(); ++k) {
      const double d = std::abs(prof.y[k] - m.base);
      double mo = std::numeric_limits<double>::quiet_NaN();
      if (oracle) {
        const auto& oy = oracle->y;
        const double s = (prof.y[k] - oy.front()) / *m.oracle_dx;
        const auto i = std::min(static_cast<std::size_t>(std::max(0.0, s)), oy.size() - 2);
        const double w = s - static_cast<double>(i);
        mo = oracle->m[i] + w * (oracle->m[i + 1] - oracle->m[i]);
      }
      t.add_row({static_cast<double>(seed), prof.y[k], prof.m[k], prof.bounds.l_mu * d, prof.bounds.L_mu * d, mo});
    }
  }
  c.write("metric", t);
}

void effective(const Context& c) {
  const auto& e = c.cfg.effective;
  const EffectiveHamiltonian hbar = build_effective(c.cfg.environment, e.role, e.seeds, e.options);
  Table t({"mu", "p_minus", "p_plus"});
  for (const auto& l : hbar.levels()) t.add_row({l.mu, l.p_minus, l.p_plus});
  c.write("effective", t);
  if (!c.quiet) c.out << "mu* = " << format_double(hbar.minimum()) << "\n";
}

void flux(const Context& c) {
  const auto est = flux_limiter(c.cfg.environment, c.cfg.flux.window, c.cfg.seeds, c.cfg.flux.tolerance);
  Table t({"seed", "a_tilde", "mu_star_left", "mu_star_right", "mu_star_middle", "a_bar", "within_tolerance"});
  for (std::size_t i = 0; i < est.seeds.size(); ++i) {
    const double a = est.empirical[i];
    const bool within = std::abs(a - est.effective) <= est.tolerance * std::abs(est.effective);
    t.add_row({static_cast<double>(est.seeds[i]), a, est.mu_star_left[i], est.mu_star_right[i], est.mu_star_middle[i],
               est.effective, within ? 1.0 : 0.0});
  }
  c.write("flux_limiter", t);
  if (!c.quiet)
    c.out << "Abar = " << format_double(est.effective) << ", failure rate = " << format_double(est.failure_rate)
          << "\n";
}

void corrector(const Context& c) {
  Table t({"seed", "y", "v", "delta_v"});
  for (std::uint64_t seed : c.cfg.seeds) {
    const CorrectorResult r = corrector_solve(c.cfg.environment.build(seed), c.cfg.corrector);
    for (std::size_t i = 0; i < r.grid.nx; ++i)
      t.add_row({static_cast<double>(seed), r.grid.x(i), r.values[i], r.delta * r.values[i]});
    if (!c.quiet)
      c.err << "seed " << seed << ": iterations " << r.iterations << ", residual " << format_double(r.residual)
            << ", delta v(0) = " << format_double(r.delta * r.value_at(0.0)) << "\n";
  }
  c.write("corrector", t);
}

Table field_table(const SolutionField& f) {
  Table t({"t", "x", "u"});
  for (std::size_t k = 0; k < f.times.size(); ++k)
    for (std::size_t i = 0; i < f.grid.nx; ++i) t.add_row({f.times[k], f.grid.x(i), f.values[k][i]});
  return t;
}

void report_field(const Context& c, const SolutionField& f) {
  if (c.quiet) return;
  c.err << "steps " << f.steps << ", dt in [" << format_double(f.dt_min) << ", " << format_double(f.dt_max)
        << "], barrier rate " << format_double(f.barrier_rate) << " <= " << format_double(f.barrier_constant)
        << (f.barrier_ok ? "" : " VIOLATED") << "\n";
}

void solve_eps(const Context& c) {
  const auto& s = c.cfg.solve;
  const Grid1D grid = Grid1D::uniform(s.grid.x_min, s.grid.x_max, s.grid.dx);
  const SolutionField f =
      solve_epsilon(s.initial_data(), s.epsilon, s.t_final, c.cfg.environment.build(c.cfg.seeds.front()), grid, s.solver);
  report_field(c, f);
  c.write("solve_eps", field_table(f));
}

void solve_limit_cmd(const Context& c) {
  const auto& s = c.cfg.solve;
  const auto& env = c.cfg.environment;
  std::optional<EffectiveHamiltonian> left, right;
  switch (s.limit.kind) {
    case LimitConfig::Kind::abs:
      left = right = EffectiveHamiltonian::absolute_value();
      break;
    case LimitConfig::Kind::core:
      left = EffectiveHamiltonian::from_core(env.left.core);
      right = EffectiveHamiltonian::from_core(env.right.value_or(env.left).core);
      break;
    case LimitConfig::Kind::homogenized: {
      EffectiveOptions eo;
      eo.window = s.limit.window;
      left = build_effective(env, PieceRole::left, s.limit.seeds, eo);
      right = env.right && env.mode == JunctionMode::wfl ? build_effective(env, PieceRole::right, s.limit.seeds, eo)
                                                         : *left;
      break;
    }
  }
  double a_bar;
  if (s.limit.a_bar) {
    a_bar = *s.limit.a_bar;
  } else if (s.limit.kind == LimitConfig::Kind::homogenized && env.mode == JunctionMode::eps) {
    a_bar = effective_limiter(env.mode, left->minimum(), right->minimum(), env.middle_scale * left->minimum());
  } else {
    a_bar = std::max(left->minimum(), right->minimum());
  }
  const Grid1D grid = Grid1D::uniform(s.grid.x_min, s.grid.x_max, s.grid.dx);
  const SolutionField f = solve_limit(s.initial_data(), *left, *right, a_bar, s.t_final, grid, s.solver);
  report_field(c, f);
  if (!c.quiet) c.out << "Abar = " << format_double(a_bar) << "\n";
  c.write("solve_limit", field_table(f));
}

void study(const Context& c) {
  if (!c.cfg.study) throw ConfigError("config.study: the study subcommand needs a \"study\" section");
  const StudyConfig& sc = *c.cfg.study;
  const StudyReport rep = run_study(sc);
  const std::string stem = "study_" + std::string(to_string(sc.kind));
  c.write(stem + "_raw", rep.raw);
  c.write(stem + "_summary", rep.summary);
  c.write_text(stem + "_checks", checks_to_csv(rep.checks));
  if (!c.quiet)
    for (const auto& ch : rep.checks)
      c.out << (ch.pass ? "PASS " : "FAIL ") << ch.name << " value=" << format_double(ch.value)
            << " target=" << format_double(ch.target) << "\n";
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"hjlab: homogenization experiments for Hamilton-Jacobi equations with a junction"};
  app.require_subcommand(1);
  Flags flags;
  const std::vector<std::pair<std::string, std::string>> commands{
      {"env-probe", "tabulate psi and H(p, y) of one realization"},
      {"metric", "metric problem m_mu(y, base) in closed form (and grid oracle)"},
      {"effective", "seed-averaged effective Hamiltonian of one piece"},
      {"flux-limiter", "per-seed window flux limiter A~ and pooled Abar"},
      {"corrector", "approximate corrector delta v + H(Dv, y) = 0"},
      {"solve-eps", "oscillating problem u_t + H(u_x, x/eps) = 0"},
      {"solve-limit", "limit junction problem with flux limiter Abar"},
      {"study", "Monte Carlo study with raw, summary and checks CSV"}};
  std::vector<CLI::App*> subs;
  for (const auto& [name, help] : commands) {
    CLI::App* s = app.add_subcommand(name, help);
    s->add_option("--config", flags.config, "JSON configuration file")->required();
    s->add_option("--out", flags.out_dir, "output directory");
    s->add_option("--seed", flags.seed, "replace the configured seeds by this one");
    s->add_option("--threads", flags.threads, "worker threads for studies")->check(CLI::PositiveNumber);
    s->add_flag("--quiet", flags.quiet, "no progress output");
    subs.push_back(s);
  }

  std::vector<std::string> rev(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return ok;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return validation_error;
  }

  std::string command;
  for (auto* s : subs)
    if (s->parsed()) command = s->get_name();

  try {
    std::ifstream in(flags.config);
    if (!in) throw ConfigError("config file \"" + flags.config + "\" is not readable");
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError("config file \"" + flags.config + "\" is not valid JSON: " + e.what());
    }
    if (!doc.is_object()) throw ConfigError("config: expected an object");
    if (flags.seed) {
      doc.erase("seed_count");
      doc["seeds"] = nlohmann::json::array({*flags.seed});
    }
    if (flags.threads) doc["threads"] = *flags.threads;
    RunConfig cfg = parse_config(doc);
    std::filesystem::create_directories(flags.out_dir);
    const std::string hash = config_hash(cfg.canonical);
    const Context ctx{std::move(cfg), hash, flags.out_dir, flags.quiet, out, err};

    if (command == "env-probe") env_probe(ctx);
    else if (command == "metric") metric(ctx);
    else if (command == "effective") effective(ctx);
    else if (command == "flux-limiter") flux(ctx);
    else if (command == "corrector") corrector(ctx);
    else if (command == "solve-eps") solve_eps(ctx);
    else if (command == "solve-limit") solve_limit_cmd(ctx);
    else study(ctx);
  } catch (const NonConvergence& e) {
    err << "error (non-convergence): " << e.what() << "\n";
    return non_convergence;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return validation_error;
  } catch (const nlohmann::json::exception& e) {
    err << "error: config: " << e.what() << "\n";
    return validation_error;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return validation_error;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return internal_error;
  }
  return ok;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  return run(std::vector<std::string>(argv, argv + argc), out, err);
}

}  // namespace hjlab::cli
