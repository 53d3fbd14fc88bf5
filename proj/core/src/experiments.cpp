#include "hjlab/experiments.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <numeric>

#include "hjlab/corrector.hpp"
#include "hjlab/effective.hpp"
#include "hjlab/errors.hpp"
#include "hjlab/hj_solver.hpp"
#include "hjlab/metric.hpp"
#include "hjlab/stats.hpp"

namespace hjlab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

using Rows = std::vector<std::vector<double>>;

bool strictly_monotone(const std::vector<double>& v) {
  if (v.size() < 2) return true;
  bool inc = true, dec = true;
  for (std::size_t i = 1; i < v.size(); ++i) {
    inc = inc && v[i] > v[i - 1];
    dec = dec && v[i] < v[i - 1];
  }
  return inc || dec;
}

// short form for check names and details; data columns keep full precision
std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

StudyCheck check_le(std::string name, double value, double target, std::string detail = {}) {
  return {std::move(name), value, target, value <= target, std::move(detail)};
}

StudyCheck check_lt(std::string name, double value, double target, std::string detail = {}) {
  return {std::move(name), value, target, value < target, std::move(detail)};
}

StudyCheck check_ge(std::string name, double value, double target, std::string detail = {}) {
  return {std::move(name), value, target, value >= target, std::move(detail)};
}

Table collect(std::vector<std::string> columns, const std::vector<Rows>& per_seed,
              const std::vector<std::string>& sort_keys) {
  Table t(std::move(columns));
  for (const auto& rows : per_seed)
    for (const auto& r : rows) t.add_row(r);
  t.sort_by(sort_keys);
  return t;
}

// ---------------------------------------------------------------------------
// slope convergence

Table raw_slope(const StudyConfig& cfg) {
  const auto& p = cfg.slope;
  std::vector<double> ts = p.t_ladder;
  std::vector<double> neg(ts.size());
  std::transform(ts.begin(), ts.end(), neg.begin(), [](double t) { return -t; });
  const auto per_seed = parallel_map<Rows>(cfg.seeds.size(), cfg.threads, [&](std::size_t i) {
    const std::uint64_t seed = cfg.seeds[i];
    const AssembledHamiltonian h = cfg.environment.build(seed);
    const auto right = h.stationary_piece(PieceRole::right);
    const auto left = h.stationary_piece(PieceRole::left);
    const auto jr = metric_profile({h, p.mu, 0.0}, ts);
    const auto jl = metric_profile({h, p.mu, 0.0}, neg);
    const auto sr = metric_profile({right, p.mu, 0.0}, ts);
    const auto sl = metric_profile({left, p.mu, 0.0}, neg);
    Rows rows;
    for (std::size_t k = 0; k < ts.size(); ++k)
      rows.push_back({static_cast<double>(seed), ts[k], p.mu, jr.m[k] / ts[k], -jl.m[k] / ts[k], sr.m[k] / ts[k],
                      -sl.m[k] / ts[k]});
    return rows;
  });
  return collect({"seed", "t", "mu", "p_plus", "p_minus", "p_plus_stationary", "p_minus_stationary"}, per_seed,
                 {"seed", "t"});
}

StudyReport summarize_slope(const StudyConfig& cfg, const Table& raw) {
  const auto& p = cfg.slope;
  StudyReport rep{StudyKind::slope_convergence, raw,
                  Table({"t", "n", "mean_p_plus", "std_p_plus", "relative_spread", "q05_p_plus", "q50_p_plus",
                         "q95_p_plus", "mean_p_minus", "std_p_minus", "mean_p_plus_stationary",
                         "mean_p_minus_stationary", "junction_gap"}),
                  {}};
  std::vector<double> ts, stds;
  double last_spread = kNaN, last_gap = kNaN;
  bool deterministic = true;
  for (double t : raw.distinct("t")) {
    const Table s = raw.filter("t", t);
    const auto pp = s.column("p_plus");
    const auto pm = s.column("p_minus");
    const auto spp = s.column("p_plus_stationary");
    const auto spm = s.column("p_minus_stationary");
    const double m = mean(pp);
    const double sd = stddev(pp);
    const double spread = sd / std::abs(m);
    const double gap = std::max(std::abs(m - mean(spp)), std::abs(mean(pm) - mean(spm)));
    rep.summary.add_row({t, static_cast<double>(s.size()), m, sd, spread, quantile(pp, 0.05), quantile(pp, 0.5),
                         quantile(pp, 0.95), mean(pm), stddev(pm), mean(spp), mean(spm), gap});
    ts.push_back(t);
    stds.push_back(sd);
    if (sd > 0.0) deterministic = false;
    last_spread = spread;
    last_gap = gap;
  }
  rep.checks.push_back(check_lt("relative_spread_at_t_max", last_spread, p.max_relative_spread,
                                "std/mean of m(t,0)/t over seeds at the largest t"));
  if (deterministic) {
    rep.checks.push_back({"spread_decay_exponent", 0.0, 0.0, true, "deterministic medium: spread identically zero"});
  } else {
    const double decay = -loglog_fit(ts, stds).slope;
    rep.checks.push_back({"spread_decay_exponent", decay, p.exponent_hi,
                          decay >= p.exponent_lo && decay <= p.exponent_hi,
                          "fitted -d log std / d log t, target [" + fmt(p.exponent_lo) + ", " + fmt(p.exponent_hi) + "]"});
  }
  rep.checks.push_back(check_le("junction_vs_stationary_gap", last_gap, p.junction_tolerance,
                                "|mean junction slope - mean stationary-piece slope| at the largest t"));
  return rep;
}

// ---------------------------------------------------------------------------
// fluctuations

Table raw_fluctuations(const StudyConfig& cfg) {
  const auto& p = cfg.fluctuations;
  const auto per_seed = parallel_map<Rows>(cfg.seeds.size(), cfg.threads, [&](std::size_t i) {
    const std::uint64_t seed = cfg.seeds[i];
    const AssembledHamiltonian h = cfg.environment.build(seed);
    Rows rows;
    for (double mu : p.mu_levels) {
      const auto prof = metric_profile({h, mu, 0.0}, p.distances);
      for (std::size_t k = 0; k < p.distances.size(); ++k)
        rows.push_back({static_cast<double>(seed), mu, p.distances[k], prof.m[k]});
    }
    return rows;
  });
  return collect({"seed", "mu", "d", "m"}, per_seed, {"seed", "mu", "d"});
}

StudyReport summarize_fluctuations(const StudyConfig& cfg, const Table& raw) {
  const auto& p = cfg.fluctuations;
  StudyReport rep{StudyKind::fluctuations, raw,
                  Table({"mu", "d", "n", "mean", "std", "p_exceed_1sd", "p_exceed_2sd", "p_exceed_3sd", "tail_c_d",
                         "beta", "tail_c"}),
                  {}};
  std::vector<double> mus, cs;
  for (double mu : raw.distinct("mu")) {
    const Table s = raw.filter("mu", mu);
    std::vector<double> ds, sds;
    Rows rows;
    double c_mu = std::numeric_limits<double>::infinity();
    for (double d : s.distinct("d")) {
      const auto m = s.filter("d", d).column("m");
      const double mm = mean(m);
      const double sd = stddev(m);
      double pex[3] = {0.0, 0.0, 0.0};
      double c_d = std::numeric_limits<double>::infinity();
      for (int k = 1; k <= 3; ++k) {
        const double lam = k * sd;
        std::size_t cnt = 0;
        for (double v : m)
          if (std::abs(v - mm) > lam) ++cnt;
        pex[k - 1] = static_cast<double>(cnt) / static_cast<double>(m.size());
        // largest c with P(|m - E m| > lam) <= exp(-c lam^2 / d)
        if (sd > 0.0 && pex[k - 1] > 0.0) c_d = std::min(c_d, -d * std::log(pex[k - 1]) / (lam * lam));
      }
      c_mu = std::min(c_mu, c_d);
      rows.push_back({mu, d, static_cast<double>(m.size()), mm, sd, pex[0], pex[1], pex[2], c_d});
      ds.push_back(d);
      sds.push_back(sd);
    }
    const bool deterministic = std::all_of(sds.begin(), sds.end(), [](double v) { return v == 0.0; });
    const double beta = deterministic ? 0.0 : loglog_fit(ds, sds).slope;
    for (auto& r : rows) {
      r.push_back(beta);
      r.push_back(c_mu);
      rep.summary.add_row(r);
    }
    if (deterministic) {
      rep.checks.push_back({"beta_mu=" + fmt(mu), 0.0, 0.0, true, "deterministic medium: std identically zero"});
    } else {
      rep.checks.push_back({"beta_mu=" + fmt(mu), beta, p.exponent_hi, beta >= p.exponent_lo && beta <= p.exponent_hi,
                            "fitted d log std / d log d, target [" + fmt(p.exponent_lo) + ", " + fmt(p.exponent_hi) +
                                "]"});
      rep.checks.push_back(check_ge("tail_constant_positive_mu=" + fmt(mu), c_mu, 0.0,
                                    "largest c with empirical tail <= exp(-c lambda^2/d) at lambda = 1,2,3 sd"));
      mus.push_back(mu);
      cs.push_back(c_mu);
    }
  }
  if (cs.size() >= 2) {
    bool mono = true;
    for (std::size_t k = 1; k < cs.size(); ++k) mono = mono && cs[k] >= cs[k - 1];
    rep.checks.push_back({"tail_constant_non_decreasing_in_mu", cs.back() - cs.front(), 0.0, mono,
                          "qualitative check of the (mu - Abar) factor along the mu ladder"});
  }
  return rep;
}

// ---------------------------------------------------------------------------
// flux limiter

Table raw_flux(const StudyConfig& cfg) {
  const auto& p = cfg.flux;
  std::vector<EnvironmentSpec> envs;
  if (cfg.environment.mode == JunctionMode::eps) {
    for (double e : p.epsilons) {
      EnvironmentSpec s = cfg.environment;
      s.epsilon = e;
      envs.push_back(s);
    }
  } else {
    envs.push_back(cfg.environment);
  }
  const auto per_seed = parallel_map<Rows>(cfg.seeds.size(), cfg.threads, [&](std::size_t i) {
    const std::uint64_t seed = cfg.seeds[i];
    Rows rows;
    for (const auto& env : envs) {
      const auto s = flux_limiter_sample(env, seed, p.window);
      const double mark0 = env.piece(PieceRole::left, seed).medium.mark(0);
      const double eps = env.mode == JunctionMode::eps ? env.epsilon : 0.0;
      rows.push_back({static_cast<double>(seed), eps, s.a_tilde, s.mu_star_left, s.mu_star_right, s.mu_star_middle,
                      mark0});
    }
    return rows;
  });
  return collect({"seed", "epsilon", "a_tilde", "mu_star_left", "mu_star_right", "mu_star_middle", "mark0"},
                 per_seed, {"seed", "epsilon"});
}

double pooled_max(const std::vector<double>& v) {
  double m = -std::numeric_limits<double>::infinity();
  for (double x : v)
    if (!std::isnan(x)) m = std::max(m, x);
  return m;
}

StudyReport summarize_counterexample(const StudyConfig& cfg, const Table& raw) {
  const auto& p = cfg.flux;
  StudyReport rep{StudyKind::flux_limiter, raw,
                  Table({"atom", "count", "frequency", "closed_form", "expected_frequency", "standard_error", "z"}), {}};
  const auto a = raw.column("a_tilde");
  const auto marks = raw.column("mark0");
  const double n = static_cast<double>(a.size());

  // closed forms per seed
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    worst = std::max(worst, std::abs(a[i] - counterexample_value(cfg.environment, marks[i])));

  std::vector<double> sorted = a;
  std::sort(sorted.begin(), sorted.end());
  std::vector<std::pair<double, std::size_t>> atoms;
  for (double v : sorted) {
    if (atoms.empty() || v - atoms.back().first > p.atom_tolerance)
      atoms.push_back({v, 1});
    else
      ++atoms.back().second;
  }
  const auto& md = cfg.environment.left.medium.marks;
  double max_z = 0.0;
  for (const auto& [v, cnt] : atoms) {
    // mark value whose closed form matches this atom
    double expected = kNaN;
    double closed = kNaN;
    for (double mk : {0.0, 1.0}) {
      const double c = counterexample_value(cfg.environment, mk);
      if (std::abs(c - v) <= p.atom_tolerance) {
        closed = c;
        if (md.kind == MarkDistribution::Kind::bernoulli) expected = mk == 1.0 ? md.q : 1.0 - md.q;
      }
    }
    const double freq = static_cast<double>(cnt) / n;
    const double se = std::isnan(expected) ? kNaN : std::sqrt(expected * (1.0 - expected) / n);
    const double z = se > 0.0 ? std::abs(freq - expected) / se : (freq == expected ? 0.0 : kNaN);
    if (std::isnan(z))
      max_z = std::numeric_limits<double>::infinity();
    else
      max_z = std::max(max_z, z);
    rep.summary.add_row({v, static_cast<double>(cnt), freq, closed, expected, se, z});
  }
  rep.checks.push_back({"two_atoms", static_cast<double>(atoms.size()), 2.0, atoms.size() == 2,
                        "distinct A~ values (clustered at " + fmt(p.atom_tolerance) + ")"});
  rep.checks.push_back(check_le("atoms_match_closed_forms", worst, p.atom_tolerance,
                                "max |A~ - H*(0) depth (base + depth X0)| over seeds"));
  rep.checks.push_back(check_le("frequencies_within_3se", max_z, 3.0, "max |freq - P(X0)| / standard error"));
  return rep;
}

StudyReport summarize_flux(const StudyConfig& cfg, const Table& raw) {
  const auto& p = cfg.flux;
  const JunctionMode mode = cfg.environment.mode;
  if (mode == JunctionMode::fixed_bump) return summarize_counterexample(cfg, raw);
  StudyReport rep{StudyKind::flux_limiter, raw,
                  Table({"epsilon", "seed", "a_tilde", "a_bar", "relative_error", "within_tolerance", "n",
                         "mean_a_tilde", "median_a_tilde", "failure_rate", "median_relative_error"}),
                  {}};
  std::vector<double> eps_list, fail_list;
  for (double e : raw.distinct("epsilon")) {
    const Table s = raw.filter("epsilon", e);
    const auto a = s.column("a_tilde");
    const double a_bar = effective_limiter(mode, pooled_max(s.column("mu_star_left")),
                                           pooled_max(s.column("mu_star_right")),
                                           pooled_max(s.column("mu_star_middle")));
    std::size_t fails = 0;
    std::vector<double> rel;
    for (double v : a) {
      rel.push_back(std::abs(v - a_bar) / std::abs(a_bar));
      if (std::abs(v - a_bar) > p.tolerance * std::abs(a_bar)) ++fails;
    }
    const double fr = static_cast<double>(fails) / static_cast<double>(a.size());
    // one row per seed; the pooled columns repeat
    const auto seeds = s.column("seed");
    for (std::size_t k = 0; k < a.size(); ++k)
      rep.summary.add_row({e, seeds[k], a[k], a_bar, rel[k], rel[k] <= p.tolerance ? 1.0 : 0.0,
                           static_cast<double>(a.size()), mean(a), median(a), fr, median(rel)});
    eps_list.push_back(e);
    fail_list.push_back(fr);
    if (mode == JunctionMode::eps)
      rep.checks.push_back(check_le("median_within_tolerance_eps=" + fmt(e), median(rel), p.tolerance,
                                    "median |A~ - mu*_0| / |mu*_0| over seeds"));
    else
      rep.checks.push_back(check_ge("success_fraction", 1.0 - fr, p.success_fraction,
                                    "fraction of seeds with |A~ - max(mu*_L, mu*_R)| <= " + fmt(p.tolerance) +
                                        " |Abar|"));
  }
  if (mode == JunctionMode::eps && fail_list.size() >= 2) {
    // eps ascending in the table; failure rate must not increase as eps decreases
    bool non_increasing = true;
    for (std::size_t k = 1; k < fail_list.size(); ++k) non_increasing = non_increasing && fail_list[k - 1] <= fail_list[k];
    const bool decreased = fail_list.front() < fail_list.back();
    rep.checks.push_back({"failure_rate_decreases_with_eps", fail_list.front() - fail_list.back(), 0.0,
                          non_increasing && decreased,
                          "failure rate non-increasing as eps decreases and lower at the smallest eps than the largest"});
  }
  return rep;
}

// ---------------------------------------------------------------------------
// corrector

struct EffectivePair {
  EffectiveHamiltonian left;
  EffectiveHamiltonian right;
};

EffectivePair effective_pair(const EnvironmentSpec& env, double window, const std::vector<std::uint64_t>& seeds) {
  EffectiveOptions eo;
  eo.window = window;
  EffectiveHamiltonian left = build_effective(env, PieceRole::left, seeds, eo);
  if (env.right && env.mode == JunctionMode::wfl)
    return {left, build_effective(env, PieceRole::right, seeds, eo)};
  return {left, left};
}

double pooled_limiter(const EnvironmentSpec& env, double window, const std::vector<std::uint64_t>& seeds) {
  return flux_limiter(env, window, seeds).effective;
}

Table raw_corrector(const StudyConfig& cfg) {
  const auto& p = cfg.corrector;
  const auto& env = cfg.environment;
  const EffectivePair eff = effective_pair(env, p.effective_window, p.effective_seeds);
  const double a_bar = pooled_limiter(env, p.effective_window, p.effective_seeds);
  const double fit_lo = env.build(cfg.seeds.front()).junction_radius() + p.fit_offset;

  const auto per_seed = parallel_map<Rows>(cfg.seeds.size(), cfg.threads, [&](std::size_t i) {
    const std::uint64_t seed = cfg.seeds[i];
    const auto s = flux_limiter_sample(env, seed, p.limiter_window);
    const bool in_omega0 = std::abs(s.a_tilde - a_bar) <= p.limiter_tolerance * std::abs(a_bar);
    const AssembledHamiltonian h = env.build(seed);
    Rows rows;
    for (double delta : p.deltas) {
      CorrectorOptions co;
      co.delta = delta;
      co.dx = p.dx;
      co.half_width = std::max(p.domain_factor * std::max(p.radius, p.slope_radius) / delta, p.min_half_width);
      const CorrectorResult res = corrector_solve(h, co);
      const double dev = res.deviation(p.radius, a_bar);
      const auto sl = corrector_slopes(res, a_bar, eff.left, eff.right, fit_lo, p.slope_radius / delta,
                                       p.slope_tolerance);
      rows.push_back({static_cast<double>(seed), delta, in_omega0 ? 1.0 : 0.0, a_bar, s.a_tilde, dev,
                      delta * res.value_at(0.0), sl.fitted ? 1.0 : 0.0, sl.fitted ? sl.right_slope : kNaN,
                      sl.fitted ? sl.left_slope : kNaN, sl.right_lo, sl.right_hi, sl.left_lo, sl.left_hi,
                      sl.right_ok ? 1.0 : 0.0, sl.left_ok ? 1.0 : 0.0, sl.control_constant, res.lipschitz,
                      res.barrier_ok ? 1.0 : 0.0, static_cast<double>(res.iterations), res.residual});
    }
    return rows;
  });
  return collect({"seed", "delta", "in_omega0", "a_bar", "a_tilde", "deviation", "delta_v0", "fitted", "right_slope",
                  "left_slope", "right_lo", "right_hi", "left_lo", "left_hi", "right_ok", "left_ok",
                  "control_constant", "lipschitz", "barrier_ok", "iterations", "residual"},
                 per_seed, {"seed", "delta"});
}

StudyReport summarize_corrector(const StudyConfig& cfg, const Table& raw) {
  const auto& p = cfg.corrector;
  StudyReport rep{StudyKind::corrector, raw,
                  Table({"delta", "n_omega0", "mean_deviation", "median_deviation", "max_deviation", "median_delta_v0", "a_bar",
                         "fitted_fraction", "slope_ok_fraction", "median_right_slope", "median_left_slope", "right_lo",
                         "right_hi", "left_lo", "left_hi", "max_lipschitz"}),
                  {}};
  const Table good = raw.filter("in_omega0", 1.0);
  const double omega_fraction = static_cast<double>(good.size()) / std::max<double>(1.0, static_cast<double>(raw.size()));
  rep.checks.push_back(check_ge("seeds_in_success_event", omega_fraction, 1e-12,
                                "fraction of seeds whose window A~ is within tolerance of Abar"));
  if (good.empty()) return rep;

  // deltas in ladder order (descending)
  std::vector<double> deltas = p.deltas;
  std::vector<double> mean_dev;
  bool slopes_ok = true;
  std::size_t fitted_total = 0;
  for (double d : deltas) {
    const Table s = good.filter("delta", d);
    if (s.empty()) continue;
    const auto dev = s.column("deviation");
    const auto fitted = s.column("fitted");
    const auto rok = s.column("right_ok");
    const auto lok = s.column("left_ok");
    std::size_t nf = 0, nok = 0;
    std::vector<double> rs, ls;
    for (std::size_t k = 0; k < s.size(); ++k) {
      if (fitted[k] == 1.0) {
        ++nf;
        rs.push_back(s.at(k, "right_slope"));
        ls.push_back(s.at(k, "left_slope"));
        if (rok[k] == 1.0 && lok[k] == 1.0)
          ++nok;
        else
          slopes_ok = false;
      }
    }
    fitted_total += nf;
    const auto lip = s.column("lipschitz");
    rep.summary.add_row({d, static_cast<double>(s.size()), mean(dev), median(dev), *std::max_element(dev.begin(), dev.end()),
                         median(s.column("delta_v0")), s.at(0, "a_bar"),
                         static_cast<double>(nf) / static_cast<double>(s.size()),
                         nf ? static_cast<double>(nok) / static_cast<double>(nf) : kNaN, rs.empty() ? kNaN : median(rs),
                         ls.empty() ? kNaN : median(ls), s.at(0, "right_lo"), s.at(0, "right_hi"), s.at(0, "left_lo"),
                         s.at(0, "left_hi"), *std::max_element(lip.begin(), lip.end())});
    mean_dev.push_back(mean(dev));
    if (std::abs(d - p.deviation_delta) <= 1e-12 * d)
      rep.checks.push_back(check_lt("deviation_at_delta=" + fmt(d), mean(dev), p.deviation_tolerance,
                                    "mean over success-event seeds of sup_{|y|<=r/delta} |delta v + Abar|"));
  }
  const std::size_t m = std::min(p.monotone_prefix, mean_dev.size());
  bool decreasing = m >= 2;
  for (std::size_t k = 1; k < m; ++k) decreasing = decreasing && mean_dev[k] < mean_dev[k - 1];
  rep.checks.push_back({"deviation_decreasing", m >= 2 ? mean_dev[m - 1] - mean_dev[0] : kNaN, 0.0, decreasing,
                        "mean deviation strictly decreasing along the first " + std::to_string(m) + " deltas"});
  rep.checks.push_back({"slopes_within_intervals", static_cast<double>(fitted_total), 1.0,
                        slopes_ok && fitted_total > 0,
                        "every fitted slope within +-" + fmt(p.slope_tolerance) + " of [pbar, phat]"});
  const auto barrier = good.column("barrier_ok");
  rep.checks.push_back({"barrier", *std::min_element(barrier.begin(), barrier.end()), 1.0,
                        std::all_of(barrier.begin(), barrier.end(), [](double v) { return v == 1.0; }),
                        "|delta v| <= E at every node and iteration"});
  return rep;
}

// ---------------------------------------------------------------------------
// homogenization

Table raw_homogenization(const StudyConfig& cfg) {
  const auto& p = cfg.homogenization;
  const auto& env = cfg.environment;
  const EffectivePair eff = effective_pair(env, p.effective_window, p.effective_seeds);
  const double mid = env.mode == JunctionMode::eps ? env.middle_scale * eff.left.minimum() : kNaN;
  const double a_bar = effective_limiter(env.mode, eff.left.minimum(), eff.right.minimum(), mid);
  const double s = p.u0_slope;
  const InitialData u0({{-1.0, s}, {0.0, 0.0}, {1.0, s}}, -s, s);

  std::vector<Rows> per_seed(cfg.seeds.size());
  for (double e : p.epsilons) {
    const double dx = e * p.dx_factor;
    const Grid1D grid = Grid1D::uniform(-p.domain_half_width, p.domain_half_width, dx, true);
    SolverOptions so;
    so.cfl = p.cfl;
    for (int k = 1; k < p.outputs; ++k) so.output_times.push_back(p.t_final * k / p.outputs);
    const SolutionField limit = solve_limit(u0, eff.left, eff.right, a_bar, p.t_final, grid, so);
    const auto rows = parallel_map<std::vector<double>>(cfg.seeds.size(), cfg.threads, [&](std::size_t i) {
      const std::uint64_t seed = cfg.seeds[i];
      const SolutionField ue = solve_epsilon(u0, e, p.t_final, env.build(seed), grid, so);
      double err = 0.0;
      for (std::size_t k = 0; k < ue.times.size(); ++k)
        for (std::size_t j = 0; j < grid.nx; ++j)
          if (std::abs(grid.x(j)) <= p.compact_half_width + 1e-12)
            err = std::max(err, std::abs(ue.values[k][j] - limit.values[k][j]));
      return std::vector<double>{static_cast<double>(seed), e, dx, err, ue.barrier_ok ? 1.0 : 0.0, ue.barrier_rate,
                                 ue.barrier_constant, ue.value(ue.times.size() - 1, 0.0),
                                 limit.value(limit.times.size() - 1, 0.0), static_cast<double>(ue.steps), a_bar};
    });
    for (std::size_t i = 0; i < rows.size(); ++i) per_seed[i].push_back(rows[i]);
  }
  return collect({"seed", "epsilon", "dx", "error", "barrier_ok", "barrier_rate", "barrier_constant", "u_eps_center",
                  "u_limit_center", "steps", "a_bar"},
                 per_seed, {"seed", "epsilon"});
}

StudyReport summarize_homogenization(const StudyConfig& cfg, const Table& raw) {
  const auto& p = cfg.homogenization;
  StudyReport rep{StudyKind::homogenization, raw,
                  Table({"epsilon", "n", "median_error", "mean_error", "max_error", "barrier_ok_fraction",
                         "max_barrier_rate", "barrier_constant"}),
                  {}};
  std::vector<double> eps = p.epsilons;  // ladder order
  std::vector<double> med;
  bool barrier = true;
  for (double e : eps) {
    const Table s = raw.filter("epsilon", e);
    if (s.empty()) continue;
    const auto err = s.column("error");
    const auto b = s.column("barrier_ok");
    const auto rate = s.column("barrier_rate");
    const auto bc = s.column("barrier_constant");
    const double okf = mean(b);
    barrier = barrier && okf == 1.0;
    rep.summary.add_row({e, static_cast<double>(s.size()), median(err), mean(err),
                         *std::max_element(err.begin(), err.end()), okf, *std::max_element(rate.begin(), rate.end()),
                         *std::max_element(bc.begin(), bc.end())});
    med.push_back(median(err));
  }
  bool decreasing = med.size() >= 2;
  for (std::size_t k = 1; k < med.size(); ++k) decreasing = decreasing && med[k] < med[k - 1];
  rep.checks.push_back({"median_error_strictly_decreasing", med.empty() ? kNaN : med.back() - med.front(), 0.0,
                        decreasing, "seed-median sup|u^eps - u| along the eps ladder"});
  if (!med.empty())
    rep.checks.push_back(check_lt("median_error_at_smallest_eps", med.back(), p.error_tolerance,
                                  "seed-median sup over the compact of |u^eps - u|"));
  rep.checks.push_back({"barrier_every_step", barrier ? 1.0 : 0.0, 1.0, barrier, "|u^eps - u0| <= C t at every step"});
  return rep;
}

}  // namespace

// ---------------------------------------------------------------------------

std::string_view to_string(StudyKind kind) {
  switch (kind) {
    case StudyKind::slope_convergence:
      return "slope_convergence";
    case StudyKind::fluctuations:
      return "fluctuations";
    case StudyKind::flux_limiter:
      return "flux_limiter";
    case StudyKind::corrector:
      return "corrector";
    case StudyKind::homogenization:
      return "homogenization";
  }
  return "?";
}

std::optional<StudyKind> parse_study_kind(std::string_view name) {
  for (StudyKind k : {StudyKind::slope_convergence, StudyKind::fluctuations, StudyKind::flux_limiter,
                      StudyKind::corrector, StudyKind::homogenization})
    if (to_string(k) == name) return k;
  return std::nullopt;
}

EnvironmentSpec stationary_environment() {
  EnvironmentSpec s;
  s.mode = JunctionMode::none;
  return s;
}

EnvironmentSpec wfl_environment(double right_depth) {
  EnvironmentSpec s;
  s.mode = JunctionMode::wfl;
  PieceSpec right;
  right.medium.bump.depth = right_depth;
  s.right = right;
  return s;
}

EnvironmentSpec eps_environment(double epsilon, double middle_scale) {
  EnvironmentSpec s;
  s.mode = JunctionMode::eps;
  s.epsilon = epsilon;
  s.middle_scale = middle_scale;
  return s;
}

EnvironmentSpec counterexample_environment(double p0, double depth) {
  EnvironmentSpec s;
  s.mode = JunctionMode::fixed_bump;
  s.left.medium.marks = MarkDistribution::bernoulli(1.0 - p0);
  s.left.medium.bump = BumpProfile::wide(depth);
  s.junction_bump = BumpProfile::wide(depth);
  return s;
}

double counterexample_value(const EnvironmentSpec& spec, double mark0) {
  const double h0 = spec.left.core.minimum();
  const double dj = spec.junction_bump.value_or(spec.left.medium.bump).depth;
  return h0 * dj * (spec.left.medium.base_level + spec.left.medium.bump.depth * mark0);
}

StudyConfig StudyConfig::defaults(StudyKind kind) {
  StudyConfig c;
  c.kind = kind;
  std::size_t n = 0;
  switch (kind) {
    case StudyKind::slope_convergence:
      c.environment = stationary_environment();
      n = 100;
      break;
    case StudyKind::fluctuations:
      c.environment = stationary_environment();
      n = 500;
      break;
    case StudyKind::flux_limiter:
      c.environment = wfl_environment();
      n = 100;
      break;
    case StudyKind::corrector:
      c.environment = eps_environment();
      n = 8;
      break;
    case StudyKind::homogenization:
      c.environment = wfl_environment();
      n = 20;
      break;
  }
  for (std::size_t i = 1; i <= n; ++i) c.seeds.push_back(i);
  return c;
}

void StudyConfig::validate() const {
  environment.validate();
  if (seeds.empty()) throw InvalidArgument("study needs at least one seed");
  if (threads < 1) throw InvalidArgument("threads must be at least 1");
  const auto ladder = [](const std::vector<double>& v, const char* name) {
    if (v.empty()) throw InvalidArgument(std::string(name) + " ladder is empty");
    if (!strictly_monotone(v)) throw InvalidArgument(std::string(name) + " ladder must be strictly monotone");
  };
  switch (kind) {
    case StudyKind::slope_convergence:
      ladder(slope.t_ladder, "t");
      if (seeds.size() < 2) throw InvalidArgument("slope convergence reports a spread: need at least 2 seeds");
      for (double t : slope.t_ladder)
        if (!(t > 0.0)) throw InvalidArgument("t ladder entries must be positive");
      break;
    case StudyKind::fluctuations:
      ladder(fluctuations.distances, "distance");
      ladder(fluctuations.mu_levels, "mu");
      if (seeds.size() < 2) throw InvalidArgument("fluctuation study reports a spread: need at least 2 seeds");
      for (double d : fluctuations.distances)
        if (!(d > 0.0)) throw InvalidArgument("distances must be positive");
      break;
    case StudyKind::flux_limiter:
      if (!(flux.window > 0.0)) throw InvalidArgument("flux limiter window must be positive");
      if (environment.mode == JunctionMode::none) throw InvalidArgument("flux limiter study needs a junction mode");
      if (environment.mode == JunctionMode::eps) ladder(flux.epsilons, "epsilon");
      break;
    case StudyKind::corrector:
      ladder(corrector.deltas, "delta");
      if (environment.mode == JunctionMode::fixed_bump)
        throw InvalidArgument("corrector study needs a convex Hamiltonian (not fixed_bump)");
      if (environment.mode == JunctionMode::eps)
        for (double d : corrector.deltas)
          if (d > environment.epsilon * (1.0 + 1e-12))
            throw InvalidArgument("corrector study requires delta <= epsilon");
      if (corrector.effective_seeds.empty()) throw InvalidArgument("effective seeds must not be empty");
      break;
    case StudyKind::homogenization:
      ladder(homogenization.epsilons, "epsilon");
      if (environment.mode == JunctionMode::fixed_bump)
        throw InvalidArgument("homogenization study needs a convex Hamiltonian (not fixed_bump)");
      if (homogenization.effective_seeds.empty()) throw InvalidArgument("effective seeds must not be empty");
      if (homogenization.outputs < 1) throw InvalidArgument("outputs must be at least 1");
      break;
  }
}

Table study_raw(const StudyConfig& cfg) {
  cfg.validate();
  switch (cfg.kind) {
    case StudyKind::slope_convergence:
      return raw_slope(cfg);
    case StudyKind::fluctuations:
      return raw_fluctuations(cfg);
    case StudyKind::flux_limiter:
      return raw_flux(cfg);
    case StudyKind::corrector:
      return raw_corrector(cfg);
    case StudyKind::homogenization:
      return raw_homogenization(cfg);
  }
  throw InvalidArgument("unknown study kind");
}

StudyReport summarize(const StudyConfig& cfg, const Table& raw) {
  switch (cfg.kind) {
    case StudyKind::slope_convergence:
      return summarize_slope(cfg, raw);
    case StudyKind::fluctuations:
      return summarize_fluctuations(cfg, raw);
    case StudyKind::flux_limiter:
      return summarize_flux(cfg, raw);
    case StudyKind::corrector:
      return summarize_corrector(cfg, raw);
    case StudyKind::homogenization:
      return summarize_homogenization(cfg, raw);
  }
  throw InvalidArgument("unknown study kind");
}

StudyReport run_study(const StudyConfig& cfg) { return summarize(cfg, study_raw(cfg)); }

std::string checks_to_csv(const std::vector<StudyCheck>& checks) {
  std::string out = "name,value,target,pass,detail\n";
  for (const auto& c : checks) {
    std::string detail = c.detail;
    std::replace(detail.begin(), detail.end(), '"', '\'');
    out += c.name + "," + format_double(c.value) + "," + format_double(c.target) + "," + (c.pass ? "1" : "0") +
           ",\"" + detail + "\"\n";
  }
  return out;
}

}  // namespace hjlab
