#include <benchmark/benchmark.h>

#include "hjlab/corrector.hpp"
#include "hjlab/effective.hpp"
#include "hjlab/experiments.hpp"
#include "hjlab/hj_solver.hpp"
#include "hjlab/metric.hpp"

using namespace hjlab;

static void BM_MetricValue(benchmark::State& state) {
  const AssembledHamiltonian h = stationary_environment().build(1);
  const double y = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(metric_value({h, 0.5, 0.0}, y));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_MetricValue)->RangeMultiplier(10)->Range(10, 100000)->Complexity();

static void BM_MetricOracle(benchmark::State& state) {
  const AssembledHamiltonian h = stationary_environment().build(1);
  const Grid1D g = Grid1D::uniform(-50.0, 50.0, 1.0 / static_cast<double>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(metric_oracle({h, 0.5, 0.0}, g).m.back());
}
BENCHMARK(BM_MetricOracle)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

static void BM_WindowSup(benchmark::State& state) {
  const AssembledHamiltonian h = wfl_environment().build(1);
  const double w = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(window_sup_at_zero(h, -w, w));
}
BENCHMARK(BM_WindowSup)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

static void BM_CorrectorSolve(benchmark::State& state) {
  const AssembledHamiltonian h = eps_environment().build(1);
  CorrectorOptions o;
  o.delta = 1.0 / static_cast<double>(state.range(0));
  o.half_width = 2.0 / o.delta;
  for (auto _ : state) benchmark::DoNotOptimize(corrector_solve(h, o).iterations);
}
BENCHMARK(BM_CorrectorSolve)->Arg(10)->Arg(100)->Unit(benchmark::kMillisecond);

static void BM_SolveEpsilon(benchmark::State& state) {
  const AssembledHamiltonian h = wfl_environment().build(1);
  const double eps = 1.0 / static_cast<double>(state.range(0));
  const Grid1D g = Grid1D::uniform(-4.0, 4.0, eps / 20.0);
  const InitialData u0({{-2.0, -0.6}, {0.0, 0.0}, {2.0, -0.6}}, 0.0, 0.0);
  for (auto _ : state) benchmark::DoNotOptimize(solve_epsilon(u0, eps, 1.0, h, g).steps);
}
BENCHMARK(BM_SolveEpsilon)->Arg(5)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
