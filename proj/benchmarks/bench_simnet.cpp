#include <benchmark/benchmark.h>

#include "txamp/simnet.hpp"

using namespace txamp::simnet;

static void BM_AmplificationScenario(benchmark::State& state) {
  const SimConfig base =
      make_eviction_config(static_cast<int>(state.range(0)), 6, 17);
  for (auto _ : state)
    benchmark::DoNotOptimize(run_attack_scenario(AttackKind::Amplification, 160, base));
}
BENCHMARK(BM_AmplificationScenario)->Arg(1)->Arg(100)->Unit(benchmark::kMillisecond);

static void BM_MeasureTaf(benchmark::State& state) {
  const SimConfig config = make_taf_config(600, 9, 41, 23);
  for (auto _ : state) benchmark::DoNotOptimize(measure_taf(config, 560.0));
}
BENCHMARK(BM_MeasureTaf)->Unit(benchmark::kMillisecond);
