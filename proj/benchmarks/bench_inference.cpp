#include <benchmark/benchmark.h>

#include <random>

#include "txamp/inference.hpp"

using namespace txamp::inference;

static void BM_BuildDistribution(benchmark::State& state) {
  std::mt19937_64 rng(3);
  std::lognormal_distribution<double> lognormal(3.4, 0.7);
  std::vector<double> samples;
  while (samples.size() < static_cast<std::size_t>(state.range(0))) {
    const double x = lognormal(rng);
    if (x >= 1.0 && x <= 900.0) samples.push_back(x);
  }
  for (auto _ : state) benchmark::DoNotOptimize(build_distribution(samples));
}
BENCHMARK(BM_BuildDistribution)->Arg(1000)->Arg(6000);

static void BM_EstimateBatch(benchmark::State& state) {
  std::mt19937_64 rng(5);
  std::vector<MessageCounts> peers;
  for (int i = 0; i < 6000; ++i) {
    const std::int64_t m = 1000 + static_cast<std::int64_t>(rng() % 100000);
    const std::int64_t m2 = 1 + static_cast<std::int64_t>(rng() % (m / 2));
    peers.push_back({"peer" + std::to_string(i), m2, m - m2});
  }
  for (auto _ : state) {
    std::vector<PeerEstimate> estimates;
    estimates.reserve(peers.size());
    for (const auto& counts : peers)
      if (auto est = make_estimate(counts)) estimates.push_back(*est);
    benchmark::DoNotOptimize(filter_estimates(std::move(estimates)));
  }
}
BENCHMARK(BM_EstimateBatch);
