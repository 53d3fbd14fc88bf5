#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "common.hpp"
#include "hjlab/effective.hpp"
#include "hjlab/errors.hpp"

using namespace hjlab;
using namespace hjlab::test;

namespace {

EnvironmentSpec bernoulli_env(double q) {
  EnvironmentSpec e = stationary_environment();
  e.left.medium.marks = MarkDistribution::bernoulli(q);
  return e;
}

// plain midpoint rule for (1/t) int_0^t p^+_mu(y) dy
double midpoint_slope(const AssembledHamiltonian& h, double mu, double a, double b, Side side, int n) {
  const double dy = (b - a) / n;
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += h.branch(a + (i + 0.5) * dy, mu, side);
  return s * dy / (b - a);
}

std::vector<std::uint64_t> seed_range(std::uint64_t n) {
  std::vector<std::uint64_t> s(n);
  std::iota(s.begin(), s.end(), 1);
  return s;
}

}  // namespace

TEST(HomogenizedSlopes, AbsAndFlat) {
  const SlopePair a = homogenized_slopes(abs_h(), 0.8, 10.0);
  EXPECT_NEAR(a.p_plus, 0.8, 1e-12);
  EXPECT_NEAR(a.p_minus, -0.8, 1e-12);
  const SlopePair f = homogenized_slopes(traffic_flat(), 1.0, 10.0);
  EXPECT_NEAR(f.p_plus, 1.5, 1e-12);
  EXPECT_NEAR(f.p_minus, -1.5, 1e-12);
}

TEST(HomogenizedSlopes, BernoulliMatchesFineMidpointRule) {
  const AssembledHamiltonian h = bernoulli_env(0.4).build(11);
  const double t = 30.0;
  for (double mu : {-0.2, 0.1, 1.0}) {
    const SlopePair s = homogenized_slopes(h, mu, t);
    EXPECT_NEAR(s.p_plus, midpoint_slope(h, mu, 0.0, t, Side::plus, 600000), 1e-6) << mu;
    EXPECT_NEAR(s.p_minus, midpoint_slope(h, mu, -t, 0.0, Side::minus, 600000), 1e-6) << mu;
  }
}

TEST(HomogenizedSlopes, VectorFormAgrees) {
  const AssembledHamiltonian h = traffic_random(2);
  const std::vector<double> mus{-0.2, 0.0, 0.5};
  const auto v = homogenized_slopes(h, mus, 50.0);
  for (std::size_t k = 0; k < mus.size(); ++k) {
    const SlopePair s = homogenized_slopes(h, mus[k], 50.0);
    EXPECT_NEAR(v[k].p_plus, s.p_plus, 1e-12);
    EXPECT_NEAR(v[k].p_minus, s.p_minus, 1e-12);
  }
}

TEST(EffectiveHamiltonian, ClosedFormTables) {
  const EffectiveHamiltonian a = EffectiveHamiltonian::absolute_value();
  for (double p : {-2.0, -0.3, 0.0, 0.7, 4.0}) EXPECT_NEAR(a(p), std::abs(p), 1e-12);
  EXPECT_NEAR(a(7.0), 7.0, 1e-12);
  EXPECT_EQ(a.minimum(), 0.0);
  EXPECT_NEAR(a.level_set(1.25, Side::plus), 1.25, 1e-12);
  EXPECT_THROW(a.level_set(-0.1, Side::plus), LevelBelowMinimum);
  EXPECT_NEAR(a.plus(-1.0), 0.0, 1e-12);
  EXPECT_NEAR(a.minus(-1.0), 1.0, 1e-12);

  const CoreHamiltonian core = CoreHamiltonian::traffic_default();
  const EffectiveHamiltonian t = EffectiveHamiltonian::from_core(core, 1.0, 5.0, 201);
  EXPECT_NEAR(t.minimum(), -0.5, 1e-12);
  for (double p : {-2.0, -0.5, 0.4, 1.2}) EXPECT_NEAR(t(p), core(p), 5e-3) << p;
  EXPECT_LE(t.convexity_defect(), 1e-9);
}

TEST(EffectiveHamiltonian, RejectsBadTables) {
  EXPECT_THROW(EffectiveHamiltonian({}), InvalidArgument);
  EXPECT_THROW(EffectiveHamiltonian({{0.0, 0.1, 0.2}}), InvalidArgument);
  EXPECT_THROW(EffectiveHamiltonian({{0.0, -0.1, 0.1}, {0.0, -0.2, 0.2}}), InvalidArgument);
  EXPECT_THROW(EffectiveHamiltonian({{0.0, -0.1, 0.3}, {1.0, -0.2, 0.2}}), InvalidArgument);
}

TEST(BuildEffective, AbsIsIdentity) {
  const EnvironmentSpec e = flat_env(CoreHamiltonian::absolute());
  const auto seeds = seed_range(2);
  EffectiveOptions o;
  o.window = 50.0;
  const EffectiveHamiltonian hb = build_effective(e, PieceRole::left, seeds, o);
  EXPECT_NEAR(hb.minimum(), 0.0, 1e-7);
  for (double p : {-1.5, -0.2, 0.3, 2.0}) EXPECT_NEAR(hb(p), std::abs(p), 1e-6) << p;
}

TEST(BuildEffective, FlatTrafficReproducesCore) {
  const EnvironmentSpec e = flat_env(CoreHamiltonian::traffic_default());
  const auto seeds = seed_range(1);
  EffectiveOptions o;
  o.window = 50.0;
  const EffectiveHamiltonian hb = build_effective(e, PieceRole::left, seeds, o);
  const CoreHamiltonian core = CoreHamiltonian::traffic_default();
  EXPECT_NEAR(hb.minimum(), -0.5, 1e-7);
  for (double mu : {-0.4, 0.0, 1.0, 3.0}) {
    EXPECT_NEAR(hb.level_set(mu, Side::plus), core.branch(mu, Side::plus), 1e-6) << mu;
    EXPECT_NEAR(hb.level_set(mu, Side::minus), core.branch(mu, Side::minus), 1e-6) << mu;
  }
}

TEST(BuildEffective, RandomMediumIsNestedAndConvex) {
  const auto seeds = seed_range(3);
  EffectiveOptions o;
  o.window = 500.0;
  const EffectiveHamiltonian hb = build_effective(stationary_environment(), PieceRole::left, seeds, o);
  EXPECT_NEAR(hb.minimum(), -0.25, 1e-6);
  const auto& lv = hb.levels();
  for (std::size_t k = 1; k < lv.size(); ++k) {
    EXPECT_GT(lv[k].mu, lv[k - 1].mu);
    EXPECT_GE(lv[k].p_plus, lv[k - 1].p_plus);
    EXPECT_LE(lv[k].p_minus, lv[k - 1].p_minus);
  }
  EXPECT_LE(hb.convexity_defect(), 1e-3);
  // averaging the slopes of each seed by hand
  const double mu = 0.3;
  double plus = 0.0;
  for (auto s : seeds) {
    const AssembledHamiltonian h = stationary_environment().build(s);
    plus += 0.5 * (homogenized_slopes(h, mu, 500.0).p_plus + homogenized_slopes(h.reversed(), mu, 500.0).p_plus);
  }
  EXPECT_NEAR(hb.level_set(mu, Side::plus), plus / seeds.size(), 2e-2);
}

TEST(MuStar, WindowAndCorrector) {
  EXPECT_NEAR(mu_star(abs_h(), MuStarMethod::sup_window), 0.0, 1e-12);
  EXPECT_NEAR(mu_star(traffic_flat(), MuStarMethod::sup_window), -0.5, 1e-12);
  const AssembledHamiltonian h = traffic_random(1);
  EXPECT_NEAR(mu_star(h, MuStarMethod::sup_window), -0.25, 1e-12);
  MuStarOptions o;
  o.delta = 0.02;
  o.corrector_radius = 1.0;
  EXPECT_NEAR(mu_star(h, MuStarMethod::corrector, o), -0.25, 0.03);
  EXPECT_NEAR(mu_star(traffic_flat(), MuStarMethod::corrector, o), -0.5, 1e-9);
}

TEST(WindowSup, MonotoneInWindow) {
  const AssembledHamiltonian h = wfl_environment().build(4);
  double prev = -1e9;
  for (double w : {0.5, 2.0, 10.0, 100.0}) {
    const double s = window_sup_at_zero(h, -w, w);
    EXPECT_GE(s, prev);
    prev = s;
  }
  EXPECT_LE(prev, -0.25 + 1e-12);
}

TEST(FluxLimiter, ClosedForms) {
  EXPECT_EQ(effective_limiter(JunctionMode::wfl, -0.25, -0.35, 7.0), -0.25);
  EXPECT_EQ(effective_limiter(JunctionMode::eps, -0.25, -0.25, -0.125), -0.125);
  EXPECT_TRUE(std::isnan(effective_limiter(JunctionMode::fixed_bump, -0.25, -0.25, 0.0)));
}

TEST(FluxLimiter, WflRegime) {
  const auto seeds = seed_range(5);
  const FluxLimiterEstimate est = flux_limiter(wfl_environment(), 2000.0, seeds);
  EXPECT_NEAR(est.effective, -0.25, 1e-9);
  ASSERT_EQ(est.empirical.size(), seeds.size());
  for (std::size_t k = 0; k < seeds.size(); ++k) {
    EXPECT_NEAR(est.mu_star_left[k], -0.25, 1e-6);
    EXPECT_NEAR(est.mu_star_right[k], -0.35, 1e-6);
    EXPECT_LE(est.empirical[k], est.effective + 1e-12);
  }
  EXPECT_EQ(est.failure_rate, 0.0);
}

TEST(FluxLimiter, EpsRegime) {
  const auto seeds = seed_range(3);
  const FluxLimiterEstimate est = flux_limiter(eps_environment(0.1, 0.5), 500.0, seeds);
  EXPECT_NEAR(est.effective, -0.125, 1e-6);
  for (double a : est.empirical) EXPECT_GE(a, -0.25 - 1e-12);
}

TEST(FluxLimiter, CounterexampleAtoms) {
  const EnvironmentSpec e = counterexample_environment();
  for (std::uint64_t s = 1; s <= 20; ++s) {
    const FluxLimiterSample smp = flux_limiter_sample(e, s, 200.0);
    const bool near_atom = std::abs(smp.a_tilde - 0.2) < 1e-9 || std::abs(smp.a_tilde - 0.12) < 1e-9;
    EXPECT_TRUE(near_atom) << smp.a_tilde;
  }
}

TEST(MuLadder, Geometric) {
  const auto l = mu_ladder(-0.25, 1e-3, 5.0, 40);
  ASSERT_EQ(l.size(), 40u);
  EXPECT_NEAR(l.front(), -0.249, 1e-12);
  EXPECT_NEAR(l.back(), 4.75, 1e-12);
  for (std::size_t k = 2; k < l.size(); ++k)
    EXPECT_NEAR((l[k] + 0.25) / (l[k - 1] + 0.25), (l[1] + 0.25) / (l[0] + 0.25), 1e-9);
}
