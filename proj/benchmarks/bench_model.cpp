#include <benchmark/benchmark.h>

#include <random>

#include "txamp/inference.hpp"
#include "txamp/model.hpp"

using namespace txamp;

static void BM_NetworkWastePointMass(benchmark::State& state) {
  model::AmplificationParams params;
  const auto g = model::ConnectionDistribution::point_mass(41.0);
  for (auto _ : state) benchmark::DoNotOptimize(model::network_waste(params, g));
}
BENCHMARK(BM_NetworkWastePointMass);

static void BM_NetworkWasteSmoothed(benchmark::State& state) {
  model::AmplificationParams params;
  std::mt19937_64 rng(4);
  std::lognormal_distribution<double> lognormal(3.4, 0.7);
  std::vector<double> samples;
  while (samples.size() < static_cast<std::size_t>(state.range(0))) {
    const double x = lognormal(rng);
    if (x >= 1.0 && x <= 900.0) samples.push_back(x);
  }
  const auto g = inference::build_distribution(samples);
  for (auto _ : state) benchmark::DoNotOptimize(model::network_waste(params, g));
}
BENCHMARK(BM_NetworkWasteSmoothed)->Arg(1000)->Arg(6000);
