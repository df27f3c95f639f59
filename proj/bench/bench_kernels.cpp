// Serial reference vs OpenMP kernels: Birman-Schwinger assembly, channel
// tables and the Fredholm determinant.

#include <benchmark/benchmark.h>

#include "lambdares/channels.hpp"
#include "lambdares/fredholm2d.hpp"
#include "lambdares/identities.hpp"

namespace {

using namespace lres;

Potential2D well_grid(int n) {
  const auto v = RadialPotential::step(1.0, -10.0);
  return Potential2D::rasterize(v, n, Potential2D::snug_half_width(1.0, n));
}

const LambdaPoint kPoint(2.0, 4.0);

void BM_KMatrixReference(benchmark::State& state) {
  const auto v = well_grid(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(k_matrix_reference(v, kPoint).entries.data());
}

void BM_KMatrixSerial(benchmark::State& state) {
  const auto v = well_grid(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(k_matrix(v, kPoint, SheetRoute::Reduction, Execution::Serial).entries.data());
  }
}

void BM_KMatrixParallel(benchmark::State& state) {
  const auto v = well_grid(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(k_matrix(v, kPoint, SheetRoute::Reduction, Execution::Parallel).entries.data());
  }
}

void BM_FredholmDet(benchmark::State& state) {
  const auto k = k_matrix(well_grid(static_cast<int>(state.range(0))), kPoint);
  for (auto _ : state) benchmark::DoNotOptimize(fredholm_det(k).value);
  state.counters["unknowns"] = static_cast<double>(k.entries.rows());
}

void channel_table_bench(benchmark::State& state, Execution exec) {
  const Scatterer s = RadialPotential::piecewise({0.6, 1.2}, {4.0, -6.0});
  const auto pts = random_points(1, static_cast<int>(state.range(0)), 0.1, 8.0, -3, 3);
  for (auto _ : state) benchmark::DoNotOptimize(channel_table(s, 20, pts, exec).size());
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_ChannelTableSerial(benchmark::State& state) { channel_table_bench(state, Execution::Serial); }
void BM_ChannelTableParallel(benchmark::State& state) { channel_table_bench(state, Execution::Parallel); }

}  // namespace

BENCHMARK(BM_KMatrixReference)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_KMatrixSerial)->Arg(16)->Arg(32)->Arg(48)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_KMatrixParallel)->Arg(16)->Arg(32)->Arg(48)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FredholmDet)->Arg(24)->Arg(32)->Arg(48)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ChannelTableSerial)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ChannelTableParallel)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
