// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "hjlab/corrector.hpp"
#include "hjlab/effective.hpp"
#include "hjlab/experiments.hpp"
#include "hjlab/hj_solver.hpp"
#include "hjlab/metric.hpp"
#include "hjlab/stats.hpp"

using namespace hjlab;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
  std::vector<std::string> notes;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      notes.push_back("failed: " + what);
    }
  }
  void note(const std::string& s) { notes.push_back(s); }
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::vector<std::uint64_t> seed_range(std::uint64_t n) {
  std::vector<std::uint64_t> s(n);
  std::iota(s.begin(), s.end(), 1);
  return s;
}

EnvironmentSpec abs_env(JunctionMode mode) {
  EnvironmentSpec e;
  e.mode = mode;
  e.left.core = CoreHamiltonian::absolute();
  e.left.medium.marks = MarkDistribution::deterministic();
  return e;
}

void report_checks(Outcome& o, const StudyReport& r) {
  for (const auto& c : r.checks) {
    o.note((c.pass ? "ok   " : "FAIL ") + c.name + " value=" + fmt(c.value) + " target=" + fmt(c.target) +
           (c.detail.empty() ? "" : " (" + c.detail + ")"));
    if (!c.pass) o.pass = false;
  }
}

// 1. |p| with psi = 1
Outcome analytic_identities() {
  Outcome o;
  const AssembledHamiltonian h = abs_env(JunctionMode::none).build(1);
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> ux(-50.0, 50.0), um(0.05, 3.0);
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    const double mu = um(rng), x = ux(rng), y = ux(rng);
    worst = std::max(worst, std::abs(metric_value({h, mu, x}, y) - mu * std::abs(y - x)));
  }
  o.require(worst <= 1e-12, "metric_value = mu|y - x| to 1e-12 (worst " + fmt(worst) + ")");
  bool exact = true;
  for (double mu : {0.1, 0.5, 1.0, 2.5}) {
    const SlopePair s = homogenized_slopes(h, mu, 1e4);
    exact = exact && s.p_plus == mu && s.p_minus == -mu;
  }
  o.require(exact, "homogenized slopes = (mu, -mu) exactly");
  const double m_win = mu_star(h, MuStarMethod::sup_window);
  const double m_cor = mu_star(h, MuStarMethod::corrector);
  o.require(m_win == 0.0 && std::abs(m_cor) <= 1e-12, "mu* = 0 by both estimators (" + fmt(m_win) + ", " +
                                                          fmt(m_cor) + ")");
  const FluxLimiterEstimate est = flux_limiter(abs_env(JunctionMode::wfl), 1e4, seed_range(3));
  o.require(est.effective == 0.0, "Abar = 0 (" + fmt(est.effective) + ")");
  for (double a : est.empirical) o.require(a == 0.0, "A~ = 0");
  const SolutionField f =
      solve_epsilon(InitialData::constant(0.0), 0.1, 1.0, h, Grid1D::uniform(-1.0, 1.0, 0.005));
  bool zero = true;
  for (const auto& row : f.values)
    for (double v : row) zero = zero && v == 0.0;
  o.require(zero, "solve_epsilon(u0 = 0) = 0");
  o.detail = "metric worst " + fmt(worst);
  return o;
}

// 2. closed form vs grid oracle
Outcome oracle_equivalence() {
  Outcome o;
  std::mt19937_64 rng(202);
  std::uniform_real_distribution<double> um(-0.2, 1.5);
  const std::vector<double> dxs{1e-2, 5e-3};
  std::vector<double> orders;
  double worst_ratio = 0.0;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const AssembledHamiltonian h = stationary_environment().build(seed);
    const double mu = um(rng);
    const SlopeEnvelope env = slope_envelope(h, mu, -50.0, 50.0);
    std::vector<double> errs;
    for (double dx : dxs) {
      const MetricProfile orc = metric_oracle({h, mu, 0.0}, Grid1D::uniform(-50.0, 50.0, dx));
      const MetricProfile cf = metric_profile({h, mu, 0.0}, orc.y);
      double e = 0.0;
      for (std::size_t k = 0; k < orc.y.size(); ++k) e = std::max(e, std::abs(orc.m[k] - cf.m[k]));
      errs.push_back(e);
      worst_ratio = std::max(worst_ratio, e / (2.0 * env.L_mu * dx));
    }
    orders.push_back(loglog_fit(dxs, errs).slope);
  }
  const double min_order = *std::min_element(orders.begin(), orders.end());
  const double med_order = median(orders);
  o.require(worst_ratio <= 1.0, "sup difference <= 2 L_mu dx (worst ratio " + fmt(worst_ratio) + ")");
  o.require(min_order >= 0.9, "fitted order >= 0.9 on every medium (min " + fmt(min_order) + ")");
  o.detail = "worst err/(2 L dx) " + fmt(worst_ratio) + ", order min " + fmt(min_order) + " median " + fmt(med_order);
  return o;
}

// 3. metric invariants on random tuples
Outcome metric_invariants() {
  Outcome o;
  std::mt19937_64 rng(303);
  std::uniform_real_distribution<double> ux(-50.0, 50.0), um(-0.2, 1.5), up(0.0, 1.0);
  const double dx = 1e-2;
  int bad_nonneg = 0, bad_norm = 0, bad_mono = 0, bad_sub = 0, bad_bounds = 0, bad_rev = 0;
  double worst_rev = 0.0, worst_sub = 0.0;
  for (int i = 0; i < 100; ++i) {
    const std::uint64_t seed = 1 + static_cast<std::uint64_t>(up(rng) * 1000.0);
    const AssembledHamiltonian h = stationary_environment().build(seed);
    const double mu = um(rng), x = ux(rng), y = ux(rng), z = ux(rng);
    const double mu2 = mu + 0.5 * up(rng);
    const double m = metric_value({h, mu, x}, y);
    if (m < 0.0) ++bad_nonneg;
    if (metric_value({h, mu, x}, x) != 0.0) ++bad_norm;
    if (metric_value({h, mu2, x}, y) < m) ++bad_mono;
    const SlopeEnvelope env = slope_envelope(h, mu, std::min({x, y, z}), std::max({x, y, z}));
    const double defect = subadditivity_defect(h, mu, x, y, z);
    worst_sub = std::max(worst_sub, defect);
    if (defect > 2.0 * env.L_mu * dx) ++bad_sub;
    const SlopeEnvelope exy = slope_envelope(h, mu, std::min(x, y), std::max(x, y));
    const double d = std::abs(y - x);
    if (exy.l_mu * d > m * (1.0 + 1e-12) + 1e-12 || m > exy.L_mu * d * (1.0 + 1e-12) + 1e-12) ++bad_bounds;
    const double rev = std::abs(reversed_metric({h, mu, x}, y) - metric_value({h, mu, y}, x));
    worst_rev = std::max(worst_rev, rev);
    if (rev > 1e-12) ++bad_rev;
  }
  o.require(bad_nonneg == 0, "nonnegativity");
  o.require(bad_norm == 0, "m(x, x) = 0");
  o.require(bad_mono == 0, "monotone in mu");
  o.require(bad_sub == 0, "subadditivity defect <= 2 L_mu dx (worst " + fmt(worst_sub) + ")");
  o.require(bad_bounds == 0, "Euclidean bounds");
  o.require(bad_rev == 0, "reversed identity to 1e-12 (worst " + fmt(worst_rev) + ")");
  o.detail = "100 tuples, subadditivity worst " + fmt(worst_sub) + ", reversed worst " + fmt(worst_rev);
  return o;
}

// 4. ergodic determinism
Outcome ergodic_determinism() {
  Outcome o;
  const StudyConfig c = StudyConfig::defaults(StudyKind::slope_convergence);
  o.require(c.seeds.size() == 100 && c.slope.t_ladder.back() == 1e4, "100 seeds up to t = 1e4");
  const StudyReport r = run_study(c);
  report_checks(o, r);
  o.detail = std::to_string(c.seeds.size()) + " seeds";
  return o;
}

// 5. two mu* estimators
Outcome mu_star_agreement() {
  Outcome o;
  const AssembledHamiltonian h = stationary_environment().build(1);
  MuStarOptions opts;
  opts.window = 1e4;
  opts.delta = 1e-2;
  const double a = mu_star(h, MuStarMethod::sup_window, opts);
  const double b = mu_star(h, MuStarMethod::corrector, opts);
  const double rel = std::abs(a - b) / std::abs(a);
  o.require(rel <= 0.05, "|window - corrector| <= 0.05 |mu*|");
  o.detail = "window " + fmt(a) + ", corrector " + fmt(b) + ", relative gap " + fmt(rel);
  return o;
}

// 6. wfl limiter
Outcome flux_wfl() {
  Outcome o;
  StudyConfig c = StudyConfig::defaults(StudyKind::flux_limiter);
  c.environment = wfl_environment();
  c.seeds = seed_range(100);
  c.flux.window = 1e4;
  c.flux.tolerance = 0.02;
  c.flux.success_fraction = 0.95;
  const StudyReport r = run_study(c);
  report_checks(o, r);
  const auto a = r.summary.column("a_bar");
  const auto within = r.summary.column("within_tolerance");
  o.detail = "Abar " + fmt(a.front()) + ", within 2% on " + fmt(std::accumulate(within.begin(), within.end(), 0.0)) +
             "/100 seeds";
  return o;
}

// 7. eps limiter
Outcome flux_eps() {
  Outcome o;
  StudyConfig c = StudyConfig::defaults(StudyKind::flux_limiter);
  c.environment = eps_environment(0.1, 0.5);
  c.seeds = seed_range(100);
  c.flux.window = 1e4;
  c.flux.epsilons = {0.2, 0.1, 0.05};
  c.flux.tolerance = 0.02;
  const StudyReport r = run_study(c);
  report_checks(o, r);
  const double mu_l = mu_star(stationary_environment().build(1), MuStarMethod::sup_window);
  std::ostringstream d;
  d << "0.5 mu*_L = " << fmt(0.5 * mu_l) << "; failure rate by eps:";
  for (double eps : c.flux.epsilons) {
    const Table t = r.summary.filter("epsilon", eps);
    d << " " << fmt(eps) << "->" << fmt(t.at(0, "failure_rate"));
    const double abar = t.at(0, "a_bar");
    o.require(std::abs(abar - 0.5 * mu_l) <= 1e-9, "Abar = 0.5 mu*_L at eps " + fmt(eps));
  }
  o.detail = d.str();
  return o;
}

// 8. counterexample: two atoms with the closed-form values
Outcome counterexample() {
  Outcome o;
  const double p0 = 0.3, psi0 = -0.4;
  StudyConfig c = StudyConfig::defaults(StudyKind::flux_limiter);
  c.environment = counterexample_environment(p0, psi0);
  c.seeds = seed_range(2000);
  c.flux.window = 1e4;
  const StudyReport r = run_study(c);
  report_checks(o, r);

  const CoreHamiltonian core = CoreHamiltonian::traffic_default();
  const double pt = core.p_tilde();
  const double g = -std::abs(pt) * (*core.velocity())(-1.0 / pt);
  const double first = g * psi0;
  const double second = g * (psi0 * psi0 + psi0);
  const auto a = r.raw.column("a_tilde");
  int n_first = 0, n_second = 0, stray = 0;
  for (double v : a) {
    if (std::abs(v - first) <= 1e-9) ++n_first;
    else if (std::abs(v - second) <= 1e-9) ++n_second;
    else ++stray;
  }
  const double n = static_cast<double>(a.size());
  const double se = std::sqrt(p0 * (1.0 - p0) / n);
  const double f1 = n_first / n;
  o.require(stray == 0, "every A~ equals one of the closed forms to 1e-9 (" + std::to_string(stray) + " stray)");
  o.require(n_first > 0 && n_second > 0, "both atoms occur");
  o.require(std::abs(f1 - p0) <= 3.0 * se, "frequencies within 3 standard errors of (0.3, 0.7)");
  o.detail = "atoms " + fmt(first) + " (freq " + fmt(f1) + "), " + fmt(second) + " (freq " + fmt(n_second / n) +
             "), se " + fmt(se);
  return o;
}

// 9. corrector convergence
Outcome corrector_convergence() {
  Outcome o;
  StudyConfig c = StudyConfig::defaults(StudyKind::corrector);
  c.corrector.deltas = {1e-1, 3e-2, 1e-2, 1e-3};
  c.corrector.monotone_prefix = 3;
  c.corrector.deviation_delta = 1e-2;
  c.corrector.deviation_tolerance = 0.05;
  c.corrector.slope_tolerance = 0.05;
  const StudyReport r = run_study(c);
  report_checks(o, r);
  std::ostringstream d;
  d << "mean deviation by delta:";
  for (std::size_t i = 0; i < r.summary.size(); ++i)
    d << " " << fmt(r.summary.at(i, "delta")) << "->" << fmt(r.summary.at(i, "mean_deviation"));
  o.detail = d.str();
  return o;
}

// 10. end-to-end homogenization
Outcome homogenization() {
  Outcome o;
  StudyConfig c = StudyConfig::defaults(StudyKind::homogenization);
  c.environment = wfl_environment();
  c.seeds = seed_range(20);
  c.homogenization.epsilons = {0.2, 0.1, 0.05};
  c.homogenization.u0_slope = -0.3;
  c.homogenization.compact_half_width = 2.0;
  c.homogenization.t_final = 1.0;
  c.homogenization.dx_factor = 1.0 / 20.0;
  c.homogenization.error_tolerance = 0.1;
  const StudyReport r = run_study(c);
  report_checks(o, r);
  std::ostringstream d;
  d << "median error by eps:";
  for (double eps : c.homogenization.epsilons)
    d << " " << fmt(eps) << "->" << fmt(median(r.raw.filter("epsilon", eps).column("error")));
  o.detail = d.str();
  return o;
}

// 11. monotone scheme properties
Outcome scheme_properties() {
  Outcome o;
  std::mt19937_64 rng(1111);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const AssembledHamiltonian h = wfl_environment().build(11);
  const Grid1D g = Grid1D::uniform(-2.0, 2.0, 0.005);
  int violations = 0;
  for (int pair = 0; pair < 20; ++pair) {
    std::vector<std::pair<double, double>> lo, hi;
    for (int k = -4; k <= 4; ++k) {
      const double x = 0.5 * k, v = 0.5 * u(rng);
      lo.push_back({x, v});
      hi.push_back({x, v + 0.25 * (1.0 + u(rng))});
    }
    const double sl = 0.5 * u(rng), sr = 0.5 * u(rng);
    const SolutionField a = solve_epsilon(InitialData(lo, sl, sr), 0.1, 0.5, h, g);
    const SolutionField b = solve_epsilon(InitialData(hi, sl, sr), 0.1, 0.5, h, g);
    for (std::size_t k = 0; k < a.times.size(); ++k)
      for (std::size_t i = 0; i < g.nx; ++i)
        if (a.values[k][i] > b.values[k][i] + 1e-12) ++violations;
  }
  o.require(violations == 0, "discrete comparison on 20 pairs");

  std::uniform_real_distribution<double> up(-3.0, 3.0), uy(-5.0, 5.0), ud(0.0, 0.5);
  int bad_consistency = 0, bad_monotone = 0;
  for (int i = 0; i < 1000; ++i) {
    const double p = up(rng), q = up(rng), y = uy(rng), d = ud(rng);
    const LocalHamiltonian loc = h.local(y);
    const double alpha = loc.lipschitz(3.5);
    for (Scheme s : {Scheme::godunov, Scheme::lax_friedrichs}) {
      if (std::abs(numerical_flux(loc, p, p, s, alpha) - loc(p)) > 1e-12) ++bad_consistency;
      const double f = numerical_flux(loc, p, q, s, alpha);
      if (numerical_flux(loc, p + d, q, s, alpha) < f - 1e-12) ++bad_monotone;
      if (numerical_flux(loc, p, q + d, s, alpha) > f + 1e-12) ++bad_monotone;
    }
  }
  o.require(bad_consistency == 0, "flux(p, p) = H(p)");
  o.require(bad_monotone == 0, "flux monotone in each slot");
  o.detail = "comparison violations " + std::to_string(violations) + ", flux triples 1000";
  return o;
}

struct Criterion {
  int id;
  const char* name;
  double budget_seconds;  // 0: no runtime bound
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "analytic identity suite", 10.0, analytic_identities},
      {2, "oracle equivalence", 60.0, oracle_equivalence},
      {3, "metric invariants", 0.0, metric_invariants},
      {4, "ergodic determinism", 120.0, ergodic_determinism},
      {5, "two-estimator mu* agreement", 0.0, mu_star_agreement},
      {6, "flux limiter, wfl regime", 0.0, flux_wfl},
      {7, "flux limiter, eps regime", 0.0, flux_eps},
      {8, "counterexample", 0.0, counterexample},
      {9, "corrector convergence", 0.0, corrector_convergence},
      {10, "end-to-end homogenization", 600.0, homogenization},
      {11, "monotone scheme properties", 0.0, scheme_properties},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.budget_seconds > 0.0 && secs > c.budget_seconds) {
      o.pass = false;
      o.notes.push_back("failed: runtime " + fmt(secs) + " s exceeds " + fmt(c.budget_seconds) + " s");
    }
    if (!o.pass) ++failed;
    std::printf("%s %2d %s [%.1f s]: %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, secs, o.detail.c_str());
    for (const auto& n : o.notes) std::printf("       %s\n", n.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
