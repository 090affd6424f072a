// Serial reference vs. OpenMP kernel for phase-map grids.
#include <benchmark/benchmark.h>

#include "uhlmann_lab/grid.hpp"

namespace {

uhl::PhaseMapSpec grid(uhl::MapTarget target, int n) {
  uhl::PhaseMapSpec spec;
  spec.target = target;
  spec.g = {0.0, 2.0, n};
  spec.theta = {0.0, uhl::pi, n};
  spec.T = uhl::Axis::fixed(0.2);
  return spec;
}

void BM_CompositeSerial(benchmark::State& state) {
  const auto spec = grid(uhl::MapTarget::Composite, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(uhl::phase_map_serial(spec));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(spec.size()));
}

void BM_CompositeParallel(benchmark::State& state) {
  const auto spec = grid(uhl::MapTarget::Composite, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(uhl::phase_map_parallel(spec, static_cast<int>(state.range(1))));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(spec.size()));
}

void BM_SubsystemSerial(benchmark::State& state) {
  const auto spec = grid(uhl::MapTarget::SubsystemB, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(uhl::phase_map_serial(spec));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(spec.size()));
}

void BM_SubsystemParallel(benchmark::State& state) {
  const auto spec = grid(uhl::MapTarget::SubsystemB, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(uhl::phase_map_parallel(spec, static_cast<int>(state.range(1))));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(spec.size()));
}

void BM_CompositeOdeSerial(benchmark::State& state) {
  auto spec = grid(uhl::MapTarget::Composite, 16);
  spec.method = uhl::HolonomyMethod::PathOrderedODE;
  spec.steps = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(uhl::phase_map_serial(spec));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(spec.size()));
}

}  // namespace

BENCHMARK(BM_CompositeSerial)->Arg(64)->Arg(200)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CompositeParallel)->Args({64, 1})->Args({64, 4})->Args({200, 1})->Args({200, 4})->UseRealTime()->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SubsystemSerial)->Arg(200)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SubsystemParallel)->Args({200, 1})->Args({200, 4})->UseRealTime()->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CompositeOdeSerial)->Arg(256)->Arg(2048)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
