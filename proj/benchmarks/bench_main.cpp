#include <benchmark/benchmark.h>

#include "rgbm/closed_form.hpp"
#include "rgbm/hedging.hpp"
#include "rgbm/mc_pricer.hpp"
#include "rgbm/path_engine.hpp"

namespace {

using namespace rgbm;

void BM_PutBarrier(benchmark::State& state) {
  auto p = reference_params();
  const auto spec = reference_spec(OptionKind::put);
  for (auto _ : state) {
    p.spot += 1e-12;
    benchmark::DoNotOptimize(put_barrier(p, spec).value);
  }
}
BENCHMARK(BM_PutBarrier);

void BM_PutBarrierDelta(benchmark::State& state) {
  auto p = reference_params();
  const auto spec = reference_spec(OptionKind::put);
  for (auto _ : state) {
    p.spot += 1e-12;
    benchmark::DoNotOptimize(delta_put_barrier(p, spec));
  }
}
BENCHMARK(BM_PutBarrierDelta);

void BM_VolThresholdPut(benchmark::State& state) {
  const auto p = reference_params();
  const auto spec = reference_spec(OptionKind::put);
  for (auto _ : state) benchmark::DoNotOptimize(vol_threshold_put(p, spec));
}
BENCHMARK(BM_VolThresholdPut);

// Single path step; arg 0 = bridge, 1 = grid, 2 = bridge with skew ladder.
void BM_WalkStep(benchmark::State& state) {
  PathConfig config;
  config.monitoring = state.range(0) == 1 ? Monitoring::grid : Monitoring::bridge;
  if (state.range(0) == 2) config.skew = SkewLadder::standard();
  const StepModel model = StepModel::gbm(reference_params(), config);
  auto rng = Xoshiro256::substream(1, 0);
  ReflectedLogWalk walk(model);
  for (auto _ : state) {
    walk.step(rng);
    benchmark::DoNotOptimize(walk.reflected());
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_WalkStep)->Arg(0)->Arg(1)->Arg(2);

void BM_McPut(benchmark::State& state) {
  PathConfig config;
  config.n_steps = 2500;
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(mc_price(reference_params(), reference_spec(OptionKind::put), config, n).mean);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_McPut)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_HedgeDirectPut(benchmark::State& state) {
  PathConfig config;
  config.measure = Measure::real_world;
  config.n_steps = static_cast<std::size_t>(state.range(0));
  const auto p = reference_params();
  const auto path = simulate_path(p, config, 0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(hedge_outcome({StrategyKind::direct_put}, p, reference_spec(OptionKind::put), path));
  }
}
BENCHMARK(BM_HedgeDirectPut)->Arg(2500)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
