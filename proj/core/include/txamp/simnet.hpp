#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "txamp/econ.hpp"
#include "txamp/errors.hpp"
#include "txamp/model.hpp"
#include "txamp/txpool.hpp"

namespace txamp::simnet {

enum class NodeRole { Regular, Modified, Attacker, Validator };

const char* to_string(NodeRole role);

struct LatencyModelSpec {
  double constant_ms = 0.0;
  double jitter_ms = 0.0;  // uniform [0, jitter_ms) on top of the constant
};

struct NodeSpec {
  int node_id = 0;
  NodeRole role = NodeRole::Regular;
  txpool::ValidationPolicy validation = txpool::ValidationPolicy::regular();
  model::PropagationPolicy propagation = model::PropagationPolicy::sqrt_policy();
  int connection_count = 0;
  LatencyModelSpec latency{};
  std::size_t pool_capacity = 5120;

  static NodeSpec regular(int id, int connections);
  // Validation skipped, aggressive propagation.
  static NodeSpec modified(int id, int connections);
  static NodeSpec attacker(int id);
};

struct Edge {
  int a = 0;
  int b = 0;
};

enum class TopologyKind { RandomRegular, ExplicitEdges };

struct SimConfig {
  std::vector<NodeSpec> nodes;  // node_id must equal the vector index
  TopologyKind topology = TopologyKind::RandomRegular;
  std::vector<Edge> edges;        // ExplicitEdges topology
  std::vector<Edge> extra_edges;  // appended after generation (e.g. attacker taps)
  // Modified nodes are operated together and interconnect fully.
  bool interconnect_modified = true;
  double slot_seconds = 12.0;
  std::size_t block_tx_budget = 128;
  int honest_accounts = 80;
  int honest_txs_each = 64;
  int attack_accounts = 0;
  int attack_txs_each = 32;
  std::uint64_t seed = 1;
  int validator_node = -1;   // -1: no block production
  int rpc_target_node = -1;  // submission point for scenario workloads
  double announce_size = 32.0;
  std::size_t max_slots = 100000;
};

// One transaction handed to a node out-of-band (RPC semantics: no gossip
// bytes are charged for the submission itself).
struct Submission {
  double time_ms = 0.0;
  int node_id = 0;
  txpool::Transaction tx;
  bool is_attack = false;
};

struct NodeTraffic {
  int node_id = 0;
  std::uint64_t bytes_in = 0;
  std::uint64_t bytes_out = 0;
  std::int64_t msgs_in = 0;
  std::int64_t msgs_out = 0;
  // end-of-run pool contents
  std::int64_t pool_size = 0;
  std::int64_t pool_attack_txs = 0;
};

struct SimMetrics {
  // Honest share of the target pool, sampled at the first block slot (or at
  // quiescence when no validator runs).
  double honest_ratio_txpool = 1.0;
  // Honest transactions included on chain / honest transactions submitted.
  double honest_ratio_block = 1.0;
  std::int64_t attack_txs_in_block = 0;
  double attack_cost_eth = 0.0;  // fees paid for attack transactions on chain
  std::int64_t honest_submitted = 0;
  std::int64_t honest_included = 0;
  std::int64_t attack_submitted = 0;
  std::int64_t blocks_produced = 0;
  std::int64_t broadcast_msgs = 0;
  std::int64_t announce_msgs = 0;
  std::uint64_t broadcast_bytes = 0;
  std::uint64_t announce_bytes = 0;
  std::uint64_t total_bytes_sent = 0;
  std::uint64_t total_bytes_received = 0;
  std::vector<NodeTraffic> per_node;
};

// Receives every delivered gossip message; feeds the estimation pipeline's
// message-log format.
class TraceSink {
 public:
  virtual ~TraceSink() = default;
  virtual void on_message(std::int64_t timestamp_ms, int receiver, int sender, int msg_type,
                          txpool::TxHash tx_hash, std::uint64_t size_bytes) = 0;
};

using ChainState = std::map<txpool::AccountId, txpool::AccountState>;

// Event-driven run: gossip to quiescence, 12 s block slots until a block
// comes up empty. Deterministic for a fixed config (single seeded RNG,
// sequence-numbered event ties).
SimMetrics run_simulation(const SimConfig& config, const std::vector<Submission>& workload,
                          ChainState initial_state, TraceSink* trace = nullptr);

enum class AttackKind { Baseline, MemPurge, Amplification };

const char* to_string(AttackKind kind);

// Fills the target pool with honest transactions, then drives one of the
// three eviction attacks against it and measures txpool/block displacement.
SimMetrics run_attack_scenario(AttackKind kind, int attack_accounts, const SimConfig& base,
                               TraceSink* trace = nullptr);

struct ScenarioOutcome {
  int attack_accounts = 0;
  SimMetrics metrics;
};

std::vector<ScenarioOutcome> sweep_attack_scenario(AttackKind kind,
                                                   const std::vector<int>& account_counts,
                                                   const SimConfig& base);

// Injects a single invalid transaction of `injected_tx_size` bytes at the
// attacker node and reports modified-node egress over attacker egress.
double measure_taf(const SimConfig& config, double injected_tx_size);

// Network of `total_nodes` nodes where node 0 doubles as the attacked pool
// and block producer, per the eviction experiments.
SimConfig make_eviction_config(int total_nodes, int degree, std::uint64_t seed);

// Near-regular network with a modified clique and one attacker tapped into
// the first modified node; every non-attacker node holds `degree` peers.
SimConfig make_taf_config(int total_nodes, int modified_count, int degree, std::uint64_t seed);

// Uniform k-subset of the candidates (partial Fisher-Yates). Shared by the
// gossip step and the propagation property tests.
std::vector<int> select_uniform_subset(std::vector<int> candidates, int count,
                                       std::mt19937_64& rng);

struct SaturationInputs {
  double modified_out_gb_per_s = 2.5;
  double modified_nodes = 90.0;
  double regular_in_mb_per_s = 12.5;
  double regular_nodes = 5910.0;
  double external_share = 0.8;
  double seconds_per_month = 2'592'000.0;  // 30 days
};

struct SaturationCost {
  double effective_tb_per_node = 0.0;  // achievable monthly egress per modified node
  double per_node_usd = 0.0;
  double aggregate_usd = 0.0;
};

// Worst-case monthly egress cost when an attacker saturates the modified
// nodes' outbound links: each modified node pushes the smaller of its own
// capacity and its share of the regular nodes' aggregate inbound capacity.
SaturationCost traffic_saturation_cost(const SaturationInputs& inputs,
                                       const econ::PricingSchedule& schedule);

}  // namespace txamp::simnet
