#include <gtest/gtest.h>

#include <cmath>

#include "common.hpp"
#include "hjlab/corrector.hpp"
#include "hjlab/errors.hpp"

using namespace hjlab;
using namespace hjlab::test;

namespace {

CorrectorOptions small_opts(double delta = 0.05, double half_width = 20.0) {
  CorrectorOptions o;
  o.delta = delta;
  o.half_width = half_width;
  o.dx = 0.02;
  return o;
}

}  // namespace

TEST(Corrector, AbsIsZero) {
  const CorrectorResult r = corrector_solve(abs_h(), small_opts());
  for (double v : r.values) EXPECT_NEAR(v, 0.0, 1e-12);
  EXPECT_NEAR(r.deviation(0.5, 0.0), 0.0, 1e-12);
}

TEST(Corrector, FlatTrafficIsConstant) {
  const CorrectorResult r = corrector_solve(traffic_flat(), small_opts());
  for (double v : r.values) EXPECT_NEAR(r.delta * v, 0.5, 1e-9);
  EXPECT_NEAR(r.deviation(0.5, -0.5), 0.0, 1e-9);
  EXPECT_TRUE(r.barrier_ok);
  EXPECT_NEAR(r.lipschitz, 0.0, 1e-6);
}

TEST(Corrector, ShiftedAbsStaysBounded) {
  CorrectorOptions o = small_opts();
  o.p_shift = 0.7;
  const CorrectorResult r = corrector_solve(abs_h(), o);
  EXPECT_NEAR(r.barrier, 0.7, 1e-12);
  EXPECT_TRUE(r.barrier_ok);
  for (double v : r.values) EXPECT_LE(std::abs(r.delta * v), r.barrier + 1e-12);
}

TEST(Corrector, BarrierOnRandomMedium) {
  const CorrectorResult r = corrector_solve(wfl_environment().build(3), small_opts(0.02, 50.0));
  EXPECT_TRUE(r.barrier_ok);
  for (double v : r.values) EXPECT_LE(std::abs(r.delta * v), r.barrier + 1e-12);
  EXPECT_LE(r.residual, 1e-8 * r.delta + 1e-12);
}

TEST(Corrector, MethodsAgree) {
  const AssembledHamiltonian h = wfl_environment().build(2);
  CorrectorOptions a = small_opts(0.1, 10.0);
  CorrectorOptions b = a;
  b.method = CorrectorMethod::time_marching;
  const CorrectorResult ra = corrector_solve(h, a);
  const CorrectorResult rb = corrector_solve(h, b);
  ASSERT_EQ(ra.values.size(), rb.values.size());
  double err = 0.0;
  for (std::size_t i = 0; i < ra.values.size(); ++i) err = std::max(err, std::abs(ra.values[i] - rb.values[i]));
  EXPECT_LE(err * a.delta, 1e-6);
}

TEST(Corrector, IterationCapRaises) {
  CorrectorOptions o = small_opts(0.01, 20.0);
  o.max_iterations = 1;
  o.method = CorrectorMethod::time_marching;
  EXPECT_THROW(corrector_solve(wfl_environment().build(1), o), NonConvergence);
}

TEST(Corrector, RejectsBadOptions) {
  CorrectorOptions o = small_opts();
  o.delta = 0.0;
  EXPECT_THROW(corrector_solve(abs_h(), o), InvalidArgument);
  o = small_opts();
  o.dx = -1.0;
  EXPECT_THROW(corrector_solve(abs_h(), o), InvalidArgument);
}

TEST(Corrector, RescaledViewMatchesValues) {
  const CorrectorResult r = corrector_solve(traffic_random(5), small_opts(0.05, 10.0));
  const auto z = r.rescaled_positions();
  const auto v = r.rescaled_values();
  ASSERT_EQ(z.size(), r.values.size());
  for (std::size_t i = 0; i < z.size(); i += 37) {
    EXPECT_NEAR(z[i], r.delta * r.grid.x(i), 1e-12);
    EXPECT_NEAR(v[i], r.delta * r.values[i], 1e-12);
  }
}

TEST(SlopeIntervals, ClosedForms) {
  const EffectiveHamiltonian a = EffectiveHamiltonian::absolute_value();
  // limiter above the minimum pins the slopes
  auto [rlo, rhi] = right_slope_interval(a, 0.5);
  EXPECT_NEAR(rlo, 0.5, 1e-12);
  EXPECT_NEAR(rhi, 0.5, 1e-12);
  auto [llo, lhi] = left_slope_interval(a, 0.5);
  EXPECT_NEAR(llo, -0.5, 1e-12);
  EXPECT_NEAR(lhi, -0.5, 1e-12);
  // at the minimum the flat part is admissible
  const EffectiveHamiltonian flat({{0.0, -0.2, 0.3}, {1.0, -1.2, 1.3}});
  auto [flo, fhi] = right_slope_interval(flat, 0.0);
  EXPECT_NEAR(flo, -0.2, 1e-12);
  EXPECT_NEAR(fhi, 0.3, 1e-12);
}

TEST(SlopeReport, WflJunctionSlopes) {
  // Abar = mu*_L = -0.25 > mu*_R = -0.35: right slope pinned, left slope flat
  const AssembledHamiltonian h = wfl_environment().build(1);
  CorrectorOptions o;
  o.delta = 0.01;
  o.half_width = 100.0;
  o.dx = 0.02;
  const CorrectorResult r = corrector_solve(h, o);
  EffectiveOptions eo;
  eo.window = 1000.0;
  const std::vector<std::uint64_t> seeds{1};
  const EffectiveHamiltonian left = build_effective(wfl_environment(), PieceRole::left, seeds, eo);
  const EffectiveHamiltonian right = build_effective(wfl_environment(), PieceRole::right, seeds, eo);
  const CorrectorSlopeReport rep = corrector_slopes(r, -0.25, left, right, 2.0, 12.0, 0.05);
  EXPECT_TRUE(rep.fitted);
  EXPECT_GT(rep.right_lo, 0.0);
  EXPECT_NEAR(rep.right_slope, rep.right_lo, 0.05);
  EXPECT_TRUE(rep.right_ok);
  EXPECT_TRUE(rep.left_ok);
  EXPECT_NEAR(r.delta * r.value_at(0.0), 0.25, 0.03);
}
