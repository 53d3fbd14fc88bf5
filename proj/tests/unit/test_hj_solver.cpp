#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "common.hpp"
#include "hjlab/errors.hpp"
#include "hjlab/hj_solver.hpp"

using namespace hjlab;
using namespace hjlab::test;

namespace {

struct AbsCore {
  double operator()(double p) const { return std::abs(p); }
  double plus(double p) const { return std::max(p, 0.0); }
  double minus(double p) const { return std::max(-p, 0.0); }
};

// same breakpoints, values raised by bump(x), same end slopes
InitialData raised(const InitialData& a, double (*bump)(double)) {
  std::vector<std::pair<double, double>> bp = a.breakpoints();
  for (auto& [x, v] : bp) v += bump(x);
  return InitialData(bp, a(-100.0) - a(-101.0), a(101.0) - a(100.0));
}

InitialData random_datum(std::mt19937_64& rng, double shift) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<std::pair<double, double>> bp;
  for (int k = -4; k <= 4; ++k) bp.push_back({0.5 * k, 0.5 * u(rng) + shift});
  return InitialData(bp, 0.5 * u(rng), 0.5 * u(rng));
}

}  // namespace

TEST(NumericalFlux, GodunovExamples) {
  const AbsCore h;
  EXPECT_EQ(numerical_flux(h, 1.0, -1.0), 1.0);
  EXPECT_EQ(numerical_flux(h, -1.0, 1.0), 0.0);
  EXPECT_EQ(numerical_flux(h, 0.4, 0.4), 0.4);
}

TEST(NumericalFlux, ConsistentAndMonotone) {
  const AssembledHamiltonian full = traffic_random(1);
  const LocalHamiltonian h = full.local(0.3);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  const double alpha = h.lipschitz(4.0);
  for (Scheme s : {Scheme::godunov, Scheme::lax_friedrichs}) {
    for (int i = 0; i < 200; ++i) {
      const double a = u(rng), b = u(rng), d = 0.1 * std::abs(u(rng));
      EXPECT_NEAR(numerical_flux(h, a, a, s, alpha), h(a), 1e-12);
      EXPECT_LE(numerical_flux(h, a, b, s, alpha), numerical_flux(h, a + d, b, s, alpha) + 1e-12);
      EXPECT_GE(numerical_flux(h, a, b, s, alpha), numerical_flux(h, a, b + d, s, alpha) - 1e-12);
    }
  }
}

TEST(InitialData, PiecewiseLinear) {
  const InitialData u({{-1.0, 1.0}, {0.0, 0.0}, {1.0, 2.0}}, -1.0, 3.0);
  EXPECT_EQ(u(-2.0), 2.0);
  EXPECT_EQ(u(-0.5), 0.5);
  EXPECT_EQ(u(0.5), 1.0);
  EXPECT_EQ(u(2.0), 5.0);
  EXPECT_EQ(u.lipschitz(), 3.0);
  EXPECT_EQ(InitialData::constant(4.0)(-7.0), 4.0);
  EXPECT_EQ(InitialData::affine(2.0, 1.0)(3.0), 7.0);
  EXPECT_THROW(InitialData({}), InvalidArgument);
}

TEST(SolveEpsilon, ZeroDataOnAbsStaysZero) {
  const SolutionField f = solve_epsilon(InitialData::constant(0.0), 0.1, 1.0, abs_h(), Grid1D::uniform(-1, 1, 0.005));
  for (const auto& row : f.values)
    for (double v : row) EXPECT_EQ(v, 0.0);
  EXPECT_TRUE(f.barrier_ok);
}

TEST(SolveEpsilon, PlaneWaveIsExactInTheInterior) {
  const CoreHamiltonian core = CoreHamiltonian::traffic_default();
  for (double p : {-1.2, -0.3, 0.8}) {
    for (Scheme s : {Scheme::godunov, Scheme::lax_friedrichs}) {
      SolverOptions o;
      o.scheme = s;
      const Grid1D g = Grid1D::uniform(-4.0, 4.0, 0.01);
      const SolutionField f = solve_epsilon(InitialData::affine(p), 0.5, 1.0, traffic_flat(), g, o);
      for (std::size_t i = 0; i < g.nx; ++i) {
        const double x = g.x(i);
        if (std::abs(x) <= 1.5) {
          EXPECT_NEAR(f.final_values()[i], p * x - core(p), 1e-9) << p << " " << x;
        }
      }
    }
  }
}

TEST(SolveEpsilon, Preconditions) {
  const Grid1D g = Grid1D::uniform(-1.0, 1.0, 0.01);
  EXPECT_THROW(solve_epsilon(InitialData::constant(0.0), 0.1, 1.0, abs_h(), g), UnresolvedScale);
  SolverOptions o;
  o.cfl = 0.95;
  EXPECT_THROW(solve_epsilon(InitialData::constant(0.0), 0.5, 1.0, abs_h(), g, o), CflViolation);
  o = {};
  o.dt = 0.02;  // |H'| = 1, dx = 0.01
  EXPECT_THROW(solve_epsilon(InitialData::constant(0.0), 0.5, 1.0, abs_h(), g, o), CflViolation);
  o.dt = 0.005;
  const SolutionField f = solve_epsilon(InitialData::constant(0.0), 0.5, 1.0, abs_h(), g, o);
  EXPECT_EQ(f.steps, 200u);
  EXPECT_NEAR(f.dt_min, 0.005, 1e-12);
}

TEST(SolveEpsilon, OutputTimes) {
  SolverOptions o;
  o.output_times = {0.25, 0.5};
  const SolutionField f =
      solve_epsilon(InitialData::affine(0.5), 0.5, 1.0, traffic_flat(), Grid1D::uniform(-2.0, 2.0, 0.02), o);
  ASSERT_EQ(f.times.size(), 4u);
  EXPECT_EQ(f.times[0], 0.0);
  EXPECT_NEAR(f.times[1], 0.25, 1e-12);
  EXPECT_NEAR(f.times[2], 0.5, 1e-12);
  EXPECT_NEAR(f.times[3], 1.0, 1e-12);
  EXPECT_NEAR(f.value(2, 0.0), -0.5 * CoreHamiltonian::traffic_default()(0.5), 1e-9);
}

TEST(SolveEpsilon, ComparisonAndConstants) {
  std::mt19937_64 rng(2);
  const AssembledHamiltonian h = wfl_environment().build(5);
  const Grid1D g = Grid1D::uniform(-2.0, 2.0, 0.005);
  for (int trial = 0; trial < 5; ++trial) {
    const InitialData a = random_datum(rng, 0.0);
    const InitialData b = raised(a, [](double x) { return 0.3 * (1.0 + std::sin(3.0 * x)); });
    const SolutionField fa = solve_epsilon(a, 0.1, 0.5, h, g);
    const SolutionField fb = solve_epsilon(b, 0.1, 0.5, h, g);
    for (std::size_t i = 0; i < g.nx; ++i) EXPECT_LE(fa.final_values()[i], fb.final_values()[i] + 1e-12);
    // adding a constant commutes with the flow (same steps since slopes agree)
    const InitialData c = raised(a, [](double) { return 1.25; });
    const SolutionField fc = solve_epsilon(c, 0.1, 0.5, h, g);
    for (std::size_t i = 0; i < g.nx; ++i) EXPECT_NEAR(fc.final_values()[i], fa.final_values()[i] + 1.25, 1e-9);
    EXPECT_TRUE(fa.barrier_ok);
  }
}

TEST(SolveEpsilon, WflLocality) {
  // on x < 0 away from the junction only the left piece matters
  const EnvironmentSpec spec = wfl_environment();
  const AssembledHamiltonian h = spec.build(3);
  const AssembledHamiltonian hl = h.stationary_piece(PieceRole::left);
  const Grid1D g = Grid1D::uniform(-4.0, 4.0, 0.005);
  SolverOptions o;
  o.dt = 0.4 * g.dx / std::max(h.lipschitz(3.0), hl.lipschitz(3.0));
  const InitialData u0({{-1.0, 0.4}, {0.0, 0.0}, {1.0, 0.4}}, -0.4, 0.4);
  const SolutionField a = solve_epsilon(u0, 0.1, 0.25, h, g, o);
  const SolutionField b = solve_epsilon(u0, 0.1, 0.25, hl, g, o);
  for (std::size_t i = 0; i < g.nx; ++i) {
    if (g.x(i) >= -3.0 && g.x(i) <= -0.5) {
      EXPECT_NEAR(a.final_values()[i], b.final_values()[i], 1e-12) << g.x(i);
    }
  }
}

TEST(SolveEpsilon, SchemesAgreeOnRandomMedium) {
  const AssembledHamiltonian h = traffic_random(4);
  const Grid1D g = Grid1D::uniform(-2.0, 2.0, 0.0025);
  const InitialData u0({{-1.0, 0.5}, {0.0, 0.0}, {1.0, 0.5}}, -0.5, 0.5);
  SolverOptions lf;
  lf.scheme = Scheme::lax_friedrichs;
  const SolutionField a = solve_epsilon(u0, 0.1, 0.5, h, g);
  const SolutionField b = solve_epsilon(u0, 0.1, 0.5, h, g, lf);
  double err = 0.0;
  for (std::size_t i = 0; i < g.nx; ++i)
    if (std::abs(g.x(i)) <= 1.0) err = std::max(err, std::abs(a.final_values()[i] - b.final_values()[i]));
  EXPECT_LE(err, 0.05);
  EXPECT_TRUE(b.barrier_ok);
}

TEST(SolveLimit, ClosedForms) {
  const EffectiveHamiltonian a = EffectiveHamiltonian::absolute_value();
  const Grid1D g = Grid1D::uniform(-1.0, 1.0, 0.01, true);
  const SolutionField z = solve_limit(InitialData::constant(0.0), a, a, 0.0, 1.0, g);
  for (double v : z.final_values()) EXPECT_EQ(v, 0.0);
  const SolutionField one = solve_limit(InitialData::constant(0.0), a, a, 1.0, 1.0, g);
  const std::size_t i0 = *g.node_at(0.0);
  for (std::size_t k = 0; k < one.times.size(); ++k) EXPECT_NEAR(one.values[k][i0], -one.times[k], 1e-12);
  EXPECT_TRUE(one.barrier_ok);
}

TEST(SolveLimit, Preconditions) {
  const EffectiveHamiltonian a = EffectiveHamiltonian::absolute_value();
  const Grid1D off = Grid1D::uniform(-1.05, 0.95, 0.1);
  try {
    solve_limit(InitialData::constant(0.0), a, a, 0.0, 1.0, off);
    FAIL() << "expected a junction error";
  } catch (const InvalidArgument& e) {
    EXPECT_NE(std::string(e.what()).find("junction"), std::string::npos);
  }
  EXPECT_THROW(solve_limit(InitialData::constant(0.0), a, a, -0.1, 1.0, Grid1D::uniform(-1, 1, 0.1)),
               InvalidLimiter);
}

TEST(SolveLimit, LipschitzNonIncreasingAndComparison) {
  const EffectiveHamiltonian l = EffectiveHamiltonian::from_core(CoreHamiltonian::traffic_default(), 0.75);
  const EffectiveHamiltonian r = EffectiveHamiltonian::from_core(CoreHamiltonian::traffic_default(), 0.9);
  const double a_bar = std::max(l.minimum(), r.minimum()) + 0.05;
  const Grid1D g = Grid1D::uniform(-2.0, 2.0, 0.01, true);
  std::mt19937_64 rng(3);
  SolverOptions o;
  o.output_times = {0.1, 0.2, 0.3, 0.4};
  for (int trial = 0; trial < 5; ++trial) {
    const InitialData u0 = random_datum(rng, 0.0);
    const SolutionField f = solve_limit(u0, l, r, a_bar, 0.5, g, o);
    for (std::size_t k = 1; k < f.lipschitz.size(); ++k) EXPECT_LE(f.lipschitz[k], f.lipschitz[k - 1] + 1e-9);
    const InitialData w = raised(u0, [](double) { return 0.2; });
    const SolutionField fw = solve_limit(w, l, r, a_bar, 0.5, g, o);
    for (std::size_t i = 0; i < g.nx; ++i) EXPECT_NEAR(fw.final_values()[i], f.final_values()[i] + 0.2, 1e-9);
    // raising the limiter lowers the solution
    const SolutionField hi = solve_limit(u0, l, r, a_bar + 0.3, 0.5, g, o);
    for (std::size_t i = 0; i < g.nx; ++i) EXPECT_LE(hi.final_values()[i], f.final_values()[i] + 1e-12);
  }
}
