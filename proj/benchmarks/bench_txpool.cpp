#include <benchmark/benchmark.h>

#include <random>

#include "txamp/txpool.hpp"

using namespace txamp::txpool;

static void BM_PoolInsertEvict(benchmark::State& state) {
  const AccountState rich{100'000'000'000'000'000ULL, 0};
  std::mt19937_64 rng(9);
  for (auto _ : state) {
    state.PauseTiming();
    TxPool pool(static_cast<std::size_t>(state.range(0)), 10);
    std::vector<Transaction> txs;
    for (std::int64_t i = 0; i < 2 * state.range(0); ++i)
      txs.push_back(make_transaction(static_cast<AccountId>(i), 0, 21000, 1 + rng() % 10000, 0));
    state.ResumeTiming();
    for (const auto& tx : txs) benchmark::DoNotOptimize(pool.insert(tx, rich));
  }
  state.SetItemsProcessed(state.iterations() * 2 * state.range(0));
}
BENCHMARK(BM_PoolInsertEvict)->Arg(5120);

static void BM_Validate(benchmark::State& state) {
  const ValidationPolicy policy = ValidationPolicy::regular();
  TxPool pool(8, policy.gas_bump_percent);
  const AccountState account{1'000'000'000'000'000'000ULL, 5};
  const Transaction tx = make_transaction(7, 5, 21000, 30'000'000'000ULL, 1000, 100);
  for (auto _ : state) benchmark::DoNotOptimize(validate(tx, account, policy, pool));
}
BENCHMARK(BM_Validate);
