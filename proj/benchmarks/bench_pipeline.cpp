#include "selpol/experiments.hpp"

#include <benchmark/benchmark.h>

using namespace selpol;

namespace {

const DressedSystem& reference_system() {
  static const DressedSystem system = solve_dressed_system(SystemParams{});
  return system;
}

void BM_Diagonalize(benchmark::State& state) {
  SystemParams params;
  params.n_max = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(solve_dressed_system(params));
}
BENCHMARK(BM_Diagonalize)->Arg(15)->Arg(30)->Unit(benchmark::kMillisecond);

void BM_OverlapMatrix(benchmark::State& state) {
  const LevelScheme scheme = make_level_scheme(reference_system(), 0.01);
  for (auto _ : state) benchmark::DoNotOptimize(overlap_matrix(scheme));
}
BENCHMARK(BM_OverlapMatrix);

void BM_SolveSelective(benchmark::State& state) {
  const OverlapMatrix overlaps = overlap_matrix(make_level_scheme(reference_system(), 0.05));
  for (auto _ : state) benchmark::DoNotOptimize(solve_selective(overlaps, 1));
}
BENCHMARK(BM_SolveSelective);

void BM_ResponseTable(benchmark::State& state) {
  const LevelScheme scheme = make_level_scheme(reference_system(), 0.01);
  const FrequencyGrid grid = quadrature_grid(scheme, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(ResponseTable::build(scheme, grid));
}
BENCHMARK(BM_ResponseTable)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_SampleAndSchmidt(benchmark::State& state) {
  const LevelScheme scheme = make_level_scheme(reference_system(), 0.01);
  const ResponseTable table = ResponseTable::build(scheme, quadrature_grid(scheme, static_cast<int>(state.range(0))));
  const SelectiveSolution solution = solve_selective(overlap_matrix(scheme), 0);
  for (auto _ : state) {
    const GriddedWavefunction psi = sample_wavefunction(table, solution.coefficients);
    benchmark::DoNotOptimize(schmidt(psi));
  }
}
BENCHMARK(BM_SampleAndSchmidt)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_SweepPoint(benchmark::State& state) {
  const LevelScheme scheme = make_level_scheme(reference_system(), 0.05);
  GridSettings grid;
  grid.n_points = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(run_sweep_point(scheme, grid, 1, 2));
}
BENCHMARK(BM_SweepPoint)->Arg(512)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
