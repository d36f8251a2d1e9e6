#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "txamp/inference.hpp"
#include "txamp/simnet.hpp"

using namespace txamp;
using namespace txamp::simnet;

namespace {

constexpr txpool::Wei kEth = 1'000'000'000'000'000'000ULL;

bool metrics_equal(const SimMetrics& a, const SimMetrics& b) {
  if (a.honest_ratio_txpool != b.honest_ratio_txpool) return false;
  if (a.honest_ratio_block != b.honest_ratio_block) return false;
  if (a.attack_txs_in_block != b.attack_txs_in_block) return false;
  if (a.attack_cost_eth != b.attack_cost_eth) return false;
  if (a.honest_included != b.honest_included) return false;
  if (a.blocks_produced != b.blocks_produced) return false;
  if (a.total_bytes_sent != b.total_bytes_sent) return false;
  if (a.total_bytes_received != b.total_bytes_received) return false;
  if (a.broadcast_msgs != b.broadcast_msgs) return false;
  if (a.announce_msgs != b.announce_msgs) return false;
  if (a.per_node.size() != b.per_node.size()) return false;
  for (std::size_t i = 0; i < a.per_node.size(); ++i) {
    if (a.per_node[i].bytes_in != b.per_node[i].bytes_in) return false;
    if (a.per_node[i].bytes_out != b.per_node[i].bytes_out) return false;
    if (a.per_node[i].pool_size != b.per_node[i].pool_size) return false;
    if (a.per_node[i].pool_attack_txs != b.per_node[i].pool_attack_txs) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("uniform subset selection is unbiased for the monitor slot") {
  // Broadcast-target choice drives the estimator; membership frequency of a
  // fixed peer must match k/x within 3 sigma.
  std::mt19937_64 rng(99);
  for (int x : {25, 49, 50}) {
    const int k = model::sqrt_broadcast_count(x);
    std::vector<int> peers(static_cast<std::size_t>(x));
    for (int i = 0; i < x; ++i) peers[static_cast<std::size_t>(i)] = i;
    const int monitor = x - 1;
    const int rounds = 10000;
    int hits = 0;
    for (int round = 0; round < rounds; ++round) {
      const auto chosen = select_uniform_subset(peers, k, rng);
      CHECK(static_cast<int>(chosen.size()) == k);
      for (int peer : chosen)
        if (peer == monitor) ++hits;
    }
    const double theta = static_cast<double>(k) / static_cast<double>(x);
    const double sigma = std::sqrt(theta * (1.0 - theta) / rounds);
    CHECK(std::abs(static_cast<double>(hits) / rounds - theta) < 3.0 * sigma);
  }
  SUBCASE("subset members are distinct and come from the candidates") {
    std::vector<int> peers{1, 2, 3, 4, 5};
    const auto chosen = select_uniform_subset(peers, 3, rng);
    const std::set<int> unique(chosen.begin(), chosen.end());
    CHECK(unique.size() == 3);
    for (int peer : unique) CHECK((peer >= 1 && peer <= 5));
    CHECK(select_uniform_subset(peers, 99, rng).size() == 5);
  }
}

TEST_CASE("single invalid transaction: hand-counted amplification") {
  // Two interconnected modified nodes with ten exclusive regular neighbors
  // each; the attacker taps the first. Expected egress: 11a + 10a = 21a.
  SimConfig config;
  config.topology = TopologyKind::ExplicitEdges;
  config.nodes.push_back(NodeSpec::modified(0, 11));
  config.nodes.push_back(NodeSpec::modified(1, 11));
  for (int i = 2; i < 22; ++i) config.nodes.push_back(NodeSpec::regular(i, 1));
  config.nodes.push_back(NodeSpec::attacker(22));
  for (int i = 2; i < 12; ++i) config.edges.push_back({0, i});
  for (int i = 12; i < 22; ++i) config.edges.push_back({1, i});
  config.edges.push_back({0, 1});
  config.edges.push_back({22, 0});

  const double taf = measure_taf(config, 560.0);
  CHECK(taf == doctest::Approx(21.0));
}

TEST_CASE("amplification dies without modified nodes on the path") {
  SimConfig config;
  config.topology = TopologyKind::ExplicitEdges;
  config.nodes.push_back(NodeSpec::regular(0, 2));
  config.nodes.push_back(NodeSpec::regular(1, 1));
  config.nodes.push_back(NodeSpec::attacker(2));
  config.edges.push_back({0, 1});
  config.edges.push_back({2, 0});
  CHECK(measure_taf(config, 560.0) == 0.0);

  SUBCASE("an attacker node is required") {
    SimConfig none;
    none.nodes.push_back(NodeSpec::regular(0, 0));
    CHECK_THROWS_AS(measure_taf(none, 560.0), configuration_error);
  }
}

TEST_CASE("attack scenarios on the single-node target") {
  const SimConfig base = make_eviction_config(1, 0, 42);

  SUBCASE("no attack accounts leaves the pool and blocks honest") {
    const SimMetrics m = run_attack_scenario(AttackKind::Amplification, 0, base);
    CHECK(m.honest_ratio_txpool == 1.0);
    CHECK(m.attack_txs_in_block == 0);
    CHECK(m.honest_ratio_block == doctest::Approx(1.0));
    CHECK(m.honest_submitted == 5120);
    CHECK(m.honest_included == 5120);
  }
  SUBCASE("amplification evicts exactly one honest entry per attack tx") {
    for (const int accounts : {40, 80}) {
      const SimMetrics m = run_attack_scenario(AttackKind::Amplification, accounts, base);
      const double expected =
          static_cast<double>(5120 - 32 * accounts) / 5120.0;  // pool-state oracle
      CHECK(m.honest_ratio_txpool == doctest::Approx(expected));
      CHECK(m.attack_txs_in_block == 0);
      CHECK(m.attack_cost_eth == 0.0);
      CHECK(m.per_node[0].pool_attack_txs == 32 * accounts);
    }
  }
  SUBCASE("amplification sweep is monotone in attack accounts") {
    double prev = 2.0;
    for (const auto& point :
         sweep_attack_scenario(AttackKind::Amplification, {0, 40, 80, 120}, base)) {
      CHECK(point.metrics.honest_ratio_txpool <= prev);
      prev = point.metrics.honest_ratio_txpool;
    }
  }
  SUBCASE("baseline pays for its evictions, mempurge barely evicts") {
    const SimMetrics baseline = run_attack_scenario(AttackKind::Baseline, 8, base);
    const SimMetrics mempurge = run_attack_scenario(AttackKind::MemPurge, 8, base);
    CHECK(baseline.attack_txs_in_block == 8 * 32);
    CHECK(baseline.attack_cost_eth > 0.0);
    CHECK(mempurge.attack_txs_in_block == 8);  // one anchor per account
    CHECK(mempurge.attack_cost_eth > 0.0);
    // MemPurge displaces no more honest transactions than Baseline.
    CHECK(mempurge.honest_ratio_txpool >= baseline.honest_ratio_txpool);
    CHECK(mempurge.honest_included >= baseline.honest_included);
    CHECK(baseline.honest_ratio_txpool == doctest::Approx((5120.0 - 256.0) / 5120.0));
    CHECK(mempurge.honest_ratio_txpool == doctest::Approx((5120.0 - 8.0) / 5120.0));
  }
}

TEST_CASE("simulation runs are deterministic and conserve bytes") {
  SimConfig config = make_eviction_config(30, 4, 7);
  const SimMetrics a = run_attack_scenario(AttackKind::Baseline, 6, config);
  const SimMetrics b = run_attack_scenario(AttackKind::Baseline, 6, config);
  CHECK(metrics_equal(a, b));
  CHECK(a.total_bytes_sent == a.total_bytes_received);
  std::uint64_t sent = 0, received = 0;
  for (const auto& node : a.per_node) {
    sent += node.bytes_out;
    received += node.bytes_in;
  }
  CHECK(sent == a.total_bytes_sent);
  CHECK(received == a.total_bytes_received);

  SUBCASE("a different seed moves the traffic") {
    config.seed = 8;
    const SimMetrics c = run_attack_scenario(AttackKind::Baseline, 6, config);
    CHECK_FALSE(metrics_equal(a, c));
  }
}

TEST_CASE("invalid transactions never sit in a fully validating pool") {
  const SimConfig config = make_eviction_config(24, 4, 3);
  const SimMetrics m = run_attack_scenario(AttackKind::Amplification, 20, config);
  for (std::size_t i = 1; i < m.per_node.size(); ++i)  // node 0 is the modified target
    CHECK(m.per_node[i].pool_attack_txs == 0);
  CHECK(m.per_node[0].pool_attack_txs > 0);
}

TEST_CASE("disconnected validator is a configuration error") {
  SimConfig config;
  config.topology = TopologyKind::ExplicitEdges;
  config.nodes.push_back(NodeSpec::regular(0, 0));  // validator, no peers
  config.nodes.push_back(NodeSpec::regular(1, 1));
  config.nodes.push_back(NodeSpec::regular(2, 1));
  config.edges.push_back({1, 2});
  config.validator_node = 0;
  config.rpc_target_node = 1;
  CHECK_THROWS_AS(run_simulation(config, {}, {}), configuration_error);
}

namespace {

class CollectingSink : public TraceSink {
 public:
  std::vector<inference::MessageLogRecord> records;
  void on_message(std::int64_t timestamp_ms, int receiver, int sender, int msg_type,
                  txpool::TxHash tx_hash, std::uint64_t) override {
    if (receiver != 1 || sender != 0) return;  // monitor's view of the peer
    inference::MessageLogRecord rec;
    rec.timestamp_ms = timestamp_ms;
    rec.monitor_id = "A";
    rec.peer_id = "peer-0";
    rec.msg_type = msg_type;
    rec.tx_hash = std::to_string(tx_hash);
    rec.tx_size_bytes = 310;
    records.push_back(std::move(rec));
  }
};

}  // namespace

TEST_CASE("simulated gossip traces feed the estimator end to end") {
  // Node 0 holds 25 peers and gossips under the sqrt policy; node 1 is the
  // monitor. The estimator should reconstruct 25 connections from the
  // broadcast/announce mix.
  const int peers = 25;
  SimConfig config;
  config.topology = TopologyKind::ExplicitEdges;
  NodeSpec hub = NodeSpec::regular(0, peers);
  hub.pool_capacity = 40000;
  config.nodes.push_back(hub);
  for (int i = 1; i <= peers; ++i) config.nodes.push_back(NodeSpec::regular(i, 1));
  for (int i = 1; i <= peers; ++i) config.edges.push_back({0, i});
  config.seed = 61;

  const int tx_count = 20000;
  std::vector<Submission> workload;
  ChainState state;
  for (int i = 0; i < tx_count; ++i) {
    const txpool::AccountId sender = 10000 + static_cast<txpool::AccountId>(i % 500);
    const std::uint64_t nonce = static_cast<std::uint64_t>(i / 500);
    state[sender] = {1000 * kEth, 0};
    workload.push_back({static_cast<double>(i) * 0.01, 0,
                        txpool::make_transaction(sender, nonce, 21000, 1'000'000'000, 0, 200),
                        false});
  }

  CollectingSink sink;
  run_simulation(config, workload, std::move(state), &sink);
  CHECK(static_cast<int>(sink.records.size()) == tx_count);

  std::vector<inference::PeerEventRecord> events{
      {"peer-0", "Geth/v1.13.4-stable-3f907d6a/linux-amd64/go1.21.3", true, 0}};
  const inference::PipelineResult result =
      inference::run_estimation_pipeline(sink.records, events, {"3f907d6a"}, {});
  REQUIRE(result.estimates.size() == 1);
  const auto& est = result.estimates[0];
  CHECK(est.included);
  CHECK(est.messages == tx_count);
  CHECK(std::abs(est.x_hat - peers) <= 2.0);
}

TEST_CASE("saturation cost") {
  SUBCASE("published capacity plan lands at 88,904 USD per node") {
    const SaturationCost cost =
        traffic_saturation_cost({}, econ::PricingSchedule::aws_default());
    CHECK(cost.effective_tb_per_node == doctest::Approx(2127.6));
    CHECK(std::abs(cost.per_node_usd - 88904.0) <= 1.0);
    CHECK(std::abs(cost.aggregate_usd - 8.0e6) <= 0.1e6);
  }
  SUBCASE("zero bandwidth, zero cost") {
    SaturationInputs inputs;
    inputs.modified_out_gb_per_s = 0.0;
    CHECK(traffic_saturation_cost(inputs, econ::PricingSchedule::aws_default()).per_node_usd ==
          0.0);
  }
  SUBCASE("flat schedule, one terabyte, all external") {
    SaturationInputs inputs;
    inputs.modified_out_gb_per_s = 1000.0 / inputs.seconds_per_month;  // 1 TB/month
    inputs.modified_nodes = 1.0;
    inputs.regular_in_mb_per_s = 1e9;
    inputs.external_share = 1.0;
    const SaturationCost cost =
        traffic_saturation_cost(inputs, econ::PricingSchedule::flat(50.0));
    CHECK(cost.per_node_usd == doctest::Approx(50.0));
  }
  SUBCASE("a modified node is required") {
    SaturationInputs inputs;
    inputs.modified_nodes = 0.0;
    CHECK_THROWS_AS(traffic_saturation_cost(inputs, econ::PricingSchedule::aws_default()),
                    parameter_error);
  }
}
