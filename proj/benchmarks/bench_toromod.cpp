#include <benchmark/benchmark.h>

#include "toromod/capacity.hpp"
#include "toromod/complex.hpp"
#include "toromod/family_paths.hpp"
#include "toromod/family_surfaces.hpp"
#include "toromod/harness.hpp"

namespace {

using namespace toromod;

void BM_BuildSolidTorus(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  for (auto _ : state) {
    ToroidalComplex c = build_solid_torus(k, 3, 8, 1.0, 1.0);
    benchmark::DoNotOptimize(c.edges.data());
  }
}
BENCHMARK(BM_BuildSolidTorus)->Arg(8)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_CapacityLaplacian(benchmark::State& state) {
  const ToroidalComplex c =
      build_solid_torus(static_cast<int>(state.range(0)), 3, 8, 1.0, 1.0);
  for (auto _ : state) {
    const CapacityReport report = solve_capacity(c, 2.0);
    benchmark::DoNotOptimize(report.value);
  }
}
BENCHMARK(BM_CapacityLaplacian)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_CapacityDescent(benchmark::State& state) {
  const ToroidalComplex c =
      build_solid_torus(16, 3, 8, 1.0, 1.0, make_warp("sin:0.5"));
  for (auto _ : state) {
    const CapacityReport report = solve_capacity(c, 3.0);
    benchmark::DoNotOptimize(report.value);
  }
}
BENCHMARK(BM_CapacityDescent)->Unit(benchmark::kMillisecond);

void BM_WindingCycleOracle(benchmark::State& state) {
  const ToroidalComplex c =
      build_solid_torus(static_cast<int>(state.range(0)), 3, 8, 1.0, 1.0);
  const Density rho(c.edges.size(), 1.0);
  for (auto _ : state) {
    const WindingCycle cycle = winding_cycle_oracle(c, rho);
    benchmark::DoNotOptimize(cycle.weight);
  }
}
BENCHMARK(BM_WindingCycleOracle)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_WindingCutOracle(benchmark::State& state) {
  const ToroidalComplex c =
      build_solid_torus(static_cast<int>(state.range(0)), 3, 8, 1.0, 1.0);
  const Density g(c.edges.size(), 1.0);
  for (auto _ : state) {
    const auto [cut, weight] = winding_cut_oracle(c, g);
    benchmark::DoNotOptimize(weight);
  }
}
BENCHMARK(BM_WindingCutOracle)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_DualityRow(benchmark::State& state) {
  const ToroidalComplex c = build_solid_torus(16, 3, 8, 1.0, 1.0);
  for (auto _ : state) {
    const DualityRow row = run_duality(c, 2.0);
    benchmark::DoNotOptimize(row.product);
  }
}
BENCHMARK(BM_DualityRow)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
