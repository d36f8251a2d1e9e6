#include "txamp/simnet.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <set>
#include <unordered_map>
#include <unordered_set>

namespace txamp::simnet {

const char* to_string(NodeRole role) {
  switch (role) {
    case NodeRole::Regular: return "regular";
    case NodeRole::Modified: return "modified";
    case NodeRole::Attacker: return "attacker";
    case NodeRole::Validator: return "validator";
  }
  return "unknown";
}

const char* to_string(AttackKind kind) {
  switch (kind) {
    case AttackKind::Baseline: return "baseline";
    case AttackKind::MemPurge: return "mempurge";
    case AttackKind::Amplification: return "amplification";
  }
  return "unknown";
}

NodeSpec NodeSpec::regular(int id, int connections) {
  NodeSpec spec;
  spec.node_id = id;
  spec.connection_count = connections;
  return spec;
}

NodeSpec NodeSpec::modified(int id, int connections) {
  NodeSpec spec;
  spec.node_id = id;
  spec.role = NodeRole::Modified;
  spec.validation = txpool::ValidationPolicy::modified();
  spec.propagation = model::PropagationPolicy::aggressive();
  spec.connection_count = connections;
  return spec;
}

NodeSpec NodeSpec::attacker(int id) {
  NodeSpec spec;
  spec.node_id = id;
  spec.role = NodeRole::Attacker;
  txpool::ValidationPolicy open;
  open.check_stateless = false;
  open.check_balance = false;
  open.check_nonce = false;
  open.gas_bump_percent = 0;
  spec.validation = open;
  spec.propagation = model::PropagationPolicy::aggressive();
  spec.connection_count = 0;
  return spec;
}

std::vector<int> select_uniform_subset(std::vector<int> candidates, int count,
                                       std::mt19937_64& rng) {
  const int n = static_cast<int>(candidates.size());
  const int k = std::min(count, n);
  for (int i = 0; i < k; ++i) {
    std::uniform_int_distribution<int> pick(i, n - 1);
    std::swap(candidates[static_cast<std::size_t>(i)],
              candidates[static_cast<std::size_t>(pick(rng))]);
  }
  candidates.resize(static_cast<std::size_t>(k));
  return candidates;
}

namespace {

constexpr std::uint64_t kWeiPerEth = 1'000'000'000'000'000'000ULL;

struct Event {
  double time_ms = 0.0;
  std::uint64_t seq = 0;
  enum class Kind { Deliver, Submit, Slot } kind = Kind::Deliver;
  int to = -1;
  int from = -1;     // -1: RPC submission
  bool full_tx = true;  // Deliver: broadcast vs announce
  std::uint32_t tx_index = 0;
};

struct EventAfter {
  bool operator()(const Event& a, const Event& b) const {
    if (a.time_ms != b.time_ms) return a.time_ms > b.time_ms;
    return a.seq > b.seq;
  }
};

struct NodeRuntime {
  NodeSpec spec;
  txpool::TxPool pool;
  std::vector<int> peers;
  std::unordered_set<txpool::TxHash> forwarded;  // accepted & broadcast once

  NodeRuntime(const NodeSpec& s)
      : spec(s), pool(s.pool_capacity, s.validation.gas_bump_percent) {}
};

class Simulation {
 public:
  Simulation(const SimConfig& config, const std::vector<Submission>& workload,
             ChainState initial_state, TraceSink* trace)
      : config_(config), chain_(std::move(initial_state)), trace_(trace), rng_(config.seed) {
    validate_config();
    for (const NodeSpec& spec : config_.nodes) nodes_.emplace_back(spec);
    metrics_.per_node.resize(nodes_.size());
    for (std::size_t i = 0; i < nodes_.size(); ++i)
      metrics_.per_node[i].node_id = static_cast<int>(i);
    build_topology();
    check_validator_reachability();
    register_workload(workload);
  }

  SimMetrics run() {
    if (config_.validator_node >= 0) schedule_slot(config_.slot_seconds * 1000.0);
    while (!queue_.empty()) {
      const Event ev = queue_.top();
      queue_.pop();
      switch (ev.kind) {
        case Event::Kind::Submit:
          handle_tx(ev.to, ev.tx_index, -1, ev.time_ms);
          break;
        case Event::Kind::Deliver:
          handle_delivery(ev);
          break;
        case Event::Kind::Slot:
          handle_slot(ev.time_ms);
          break;
      }
    }
    finalize_metrics();
    return metrics_;
  }

 private:
  void validate_config() {
    if (config_.nodes.empty()) throw configuration_error("simulation needs at least one node");
    for (std::size_t i = 0; i < config_.nodes.size(); ++i)
      if (config_.nodes[i].node_id != static_cast<int>(i))
        throw configuration_error("node_id must match its index in the node list");
    if (config_.validator_node >= static_cast<int>(config_.nodes.size()))
      throw configuration_error("validator_node out of range");
    if (config_.rpc_target_node >= static_cast<int>(config_.nodes.size()))
      throw configuration_error("rpc_target_node out of range");
    if (config_.slot_seconds <= 0.0) throw configuration_error("slot_seconds must be positive");
  }

  void add_edge(int a, int b) {
    if (a == b) return;
    if (a > b) std::swap(a, b);
    if (!edge_set_.insert((static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b))
             .second)
      return;
    nodes_[static_cast<std::size_t>(a)].peers.push_back(b);
    nodes_[static_cast<std::size_t>(b)].peers.push_back(a);
  }

  void build_topology() {
    if (config_.topology == TopologyKind::ExplicitEdges) {
      for (const Edge& e : config_.edges) add_edge(e.a, e.b);
    } else {
      if (config_.interconnect_modified) {
        std::vector<int> modified;
        for (const auto& node : nodes_)
          if (node.spec.role == NodeRole::Modified) modified.push_back(node.spec.node_id);
        for (std::size_t i = 0; i < modified.size(); ++i)
          for (std::size_t j = i + 1; j < modified.size(); ++j)
            add_edge(modified[i], modified[j]);
      }
      std::vector<int> stubs;
      for (const auto& node : nodes_) {
        const int want = node.spec.connection_count - static_cast<int>(node.peers.size());
        for (int i = 0; i < want; ++i) stubs.push_back(node.spec.node_id);
      }
      // Configuration model with retries; a handful of unmatched stubs is
      // acceptable (near-regular graph).
      for (int attempt = 0; attempt < 64 && stubs.size() >= 2; ++attempt) {
        std::shuffle(stubs.begin(), stubs.end(), rng_);
        std::vector<int> leftover;
        for (std::size_t i = 0; i + 1 < stubs.size(); i += 2) {
          const int a = stubs[i];
          const int b = stubs[i + 1];
          const std::uint64_t key = a < b
                                        ? (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b)
                                        : (static_cast<std::uint64_t>(b) << 32) | static_cast<std::uint32_t>(a);
          if (a == b || edge_set_.count(key) != 0) {
            leftover.push_back(a);
            leftover.push_back(b);
            continue;
          }
          add_edge(a, b);
        }
        if (stubs.size() % 2 == 1) leftover.push_back(stubs.back());
        stubs = std::move(leftover);
      }
    }
    for (const Edge& e : config_.extra_edges) add_edge(e.a, e.b);
  }

  void check_validator_reachability() {
    const int v = config_.validator_node;
    if (v < 0 || nodes_.size() == 1) return;
    if (!nodes_[static_cast<std::size_t>(v)].peers.empty()) return;
    if (config_.rpc_target_node == v) return;  // hears transactions over RPC
    throw configuration_error("validator node " + std::to_string(v) +
                              " has no connections and cannot hear transactions");
  }

  void register_workload(const std::vector<Submission>& workload) {
    txs_.reserve(workload.size());
    for (const Submission& sub : workload) {
      if (sub.node_id < 0 || sub.node_id >= static_cast<int>(nodes_.size()))
        throw configuration_error("submission targets unknown node");
      const std::uint32_t index = static_cast<std::uint32_t>(txs_.size());
      txs_.push_back(sub.tx);
      is_attack_.push_back(sub.is_attack);
      tx_index_by_hash_.emplace(sub.tx.hash, index);
      if (sub.is_attack) {
        ++metrics_.attack_submitted;
      } else {
        ++metrics_.honest_submitted;
      }
      push_event({sub.time_ms, next_seq_++, Event::Kind::Submit, sub.node_id, -1, true, index});
    }
  }

  void push_event(Event ev) { queue_.push(ev); }

  void schedule_slot(double at_ms) {
    push_event({at_ms, next_seq_++, Event::Kind::Slot, -1, -1, true, 0});
  }

  double hop_delay(const NodeRuntime& sender) {
    double delay = sender.spec.latency.constant_ms;
    if (sender.spec.latency.jitter_ms > 0.0) {
      std::uniform_real_distribution<double> jitter(0.0, sender.spec.latency.jitter_ms);
      delay += jitter(rng_);
    }
    return delay;
  }

  const txpool::AccountState& account(txpool::AccountId id) const {
    static const txpool::AccountState kEmpty{};
    const auto it = chain_.find(id);
    return it == chain_.end() ? kEmpty : it->second;
  }

  void send(int from, int to, bool full_tx, std::uint32_t tx_index, double at_ms) {
    NodeRuntime& sender = nodes_[static_cast<std::size_t>(from)];
    const txpool::Transaction& tx = txs_[tx_index];
    const std::uint64_t size =
        full_tx ? tx.total_size : static_cast<std::uint64_t>(config_.announce_size);
    auto& out = metrics_.per_node[static_cast<std::size_t>(from)];
    out.bytes_out += size;
    out.msgs_out += 1;
    metrics_.total_bytes_sent += size;
    if (full_tx) {
      metrics_.broadcast_msgs += 1;
      metrics_.broadcast_bytes += size;
    } else {
      metrics_.announce_msgs += 1;
      metrics_.announce_bytes += size;
    }
    push_event(
        {at_ms + hop_delay(sender), next_seq_++, Event::Kind::Deliver, to, from, full_tx, tx_index});
  }

  void handle_delivery(const Event& ev) {
    const txpool::Transaction& tx = txs_[ev.tx_index];
    const std::uint64_t size =
        ev.full_tx ? tx.total_size : static_cast<std::uint64_t>(config_.announce_size);
    auto& in = metrics_.per_node[static_cast<std::size_t>(ev.to)];
    in.bytes_in += size;
    in.msgs_in += 1;
    metrics_.total_bytes_received += size;
    if (trace_ != nullptr)
      trace_->on_message(static_cast<std::int64_t>(std::llround(ev.time_ms)), ev.to, ev.from,
                         ev.full_tx ? 2 : 8, tx.hash, size);
    // Announcements only mark awareness; content requests are not modeled.
    if (!ev.full_tx) return;
    handle_tx(ev.to, ev.tx_index, ev.from, ev.time_ms);
  }

  void handle_tx(int node_id, std::uint32_t tx_index, int source, double at_ms) {
    NodeRuntime& node = nodes_[static_cast<std::size_t>(node_id)];
    const txpool::Transaction& tx = txs_[tx_index];
    if (node.forwarded.count(tx.hash) != 0) return;
    if (node.pool.contains(tx.hash)) return;
    const txpool::AccountState& state = account(tx.sender);
    const auto verdict = txpool::validate(tx, state, node.spec.validation, node.pool);
    // A rejected transaction is not remembered: the node pays the validation
    // cost again on every delivery.
    if (!verdict.accepted) return;
    const auto inserted = node.pool.insert(tx, state);
    if (inserted.outcome == txpool::InsertOutcome::RejectedFull) return;
    node.forwarded.insert(tx.hash);
    forward(node_id, tx_index, source, at_ms);
  }

  void forward(int node_id, std::uint32_t tx_index, int source, double at_ms) {
    NodeRuntime& node = nodes_[static_cast<std::size_t>(node_id)];
    std::vector<int> candidates;
    candidates.reserve(node.peers.size());
    for (int peer : node.peers)
      if (peer != source) candidates.push_back(peer);
    if (candidates.empty()) return;

    const auto& policy = node.spec.propagation;
    switch (policy.kind) {
      case model::PolicyKind::Aggressive:
        for (int peer : candidates) send(node_id, peer, true, tx_index, at_ms);
        break;
      case model::PolicyKind::SqrtPolicy: {
        const int k = model::sqrt_broadcast_count(static_cast<int>(node.peers.size()));
        const std::vector<int> chosen = select_uniform_subset(candidates, k, rng_);
        std::unordered_set<int> direct(chosen.begin(), chosen.end());
        for (int peer : chosen) send(node_id, peer, true, tx_index, at_ms);
        for (int peer : candidates)
          if (direct.count(peer) == 0) send(node_id, peer, false, tx_index, at_ms);
        break;
      }
      case model::PolicyKind::ConstantPeers: {
        const std::vector<int> chosen =
            select_uniform_subset(candidates, policy.broadcast_count, rng_);
        std::unordered_set<int> direct(chosen.begin(), chosen.end());
        std::vector<int> rest;
        for (int peer : candidates)
          if (direct.count(peer) == 0) rest.push_back(peer);
        const std::vector<int> announce =
            select_uniform_subset(rest, policy.announce_count, rng_);
        for (int peer : chosen) send(node_id, peer, true, tx_index, at_ms);
        for (int peer : announce) send(node_id, peer, false, tx_index, at_ms);
        break;
      }
    }
  }

  // Highest-priced pool entry at (sender, nonce); lowest hash breaks ties
  // between bump-free duplicates.
  const txpool::Transaction* best_at(const txpool::TxPool& pool, txpool::AccountId sender,
                                     std::uint64_t nonce) const {
    const txpool::Transaction* best = nullptr;
    for (const auto& tx : pool.sender_txs(sender)) {
      if (tx.nonce != nonce) continue;
      if (best == nullptr || tx.gas_price > best->gas_price ||
          (tx.gas_price == best->gas_price && tx.hash < best->hash))
        best = pool.find(tx.hash);
    }
    return best;
  }

  void snapshot_txpool_ratio() {
    const int target =
        config_.rpc_target_node >= 0 ? config_.rpc_target_node : config_.validator_node;
    if (target < 0) return;
    const auto snapshot = nodes_[static_cast<std::size_t>(target)].pool.snapshot();
    if (snapshot.empty()) {
      metrics_.honest_ratio_txpool = 1.0;
      return;
    }
    std::size_t honest = 0;
    for (const auto& tx : snapshot) {
      const auto it = tx_index_by_hash_.find(tx.hash);
      if (it == tx_index_by_hash_.end() || !is_attack_[it->second]) ++honest;
    }
    metrics_.honest_ratio_txpool =
        static_cast<double>(honest) / static_cast<double>(snapshot.size());
  }

  void handle_slot(double at_ms) {
    if (!txpool_snapshot_taken_) {
      snapshot_txpool_ratio();
      txpool_snapshot_taken_ = true;
    }
    const std::size_t included = produce_block();
    ++metrics_.blocks_produced;
    ++slots_run_;
    // Keep producing while the chain is making progress; the final empty
    // block is the quiescence slot.
    if ((included > 0 || !queue_.empty()) && slots_run_ < config_.max_slots)
      schedule_slot(at_ms + config_.slot_seconds * 1000.0);
  }

  std::size_t produce_block() {
    NodeRuntime& validator = nodes_[static_cast<std::size_t>(config_.validator_node)];
    txpool::TxPool& pool = validator.pool;

    struct Candidate {
      txpool::Wei gas_price;
      txpool::TxHash hash;
      txpool::AccountId sender;
      bool operator<(const Candidate& o) const {  // max-heap by price, then hash
        if (gas_price != o.gas_price) return gas_price < o.gas_price;
        return hash > o.hash;
      }
    };

    std::map<txpool::AccountId, txpool::AccountState> working;
    auto state_of = [&](txpool::AccountId id) -> txpool::AccountState& {
      const auto it = working.find(id);
      if (it != working.end()) return it->second;
      return working.emplace(id, account(id)).first->second;
    };

    std::priority_queue<Candidate> heap;
    for (const txpool::AccountId sender : pool.senders()) {
      const txpool::AccountState& st = state_of(sender);
      if (const auto* tx = best_at(pool, sender, st.nonce))
        heap.push({tx->gas_price, tx->hash, sender});
    }

    std::vector<txpool::Transaction> included;
    while (!heap.empty() && included.size() < config_.block_tx_budget) {
      const Candidate top = heap.top();
      heap.pop();
      const txpool::Transaction* tx = pool.find(top.hash);
      if (tx == nullptr) continue;
      txpool::AccountState& st = state_of(tx->sender);
      if (tx->nonce != st.nonce) continue;  // stale candidate
      if (tx->max_cost() > st.balance) continue;  // unaffordable: chain stalls here
      included.push_back(*tx);
      st.balance -= static_cast<txpool::Wei>(tx->max_cost());
      st.nonce += 1;
      if (const auto* next = best_at(pool, tx->sender, st.nonce))
        heap.push({next->gas_price, next->hash, tx->sender});
    }

    if (included.empty()) return 0;

    std::unordered_set<txpool::TxHash> included_hashes;
    std::set<txpool::AccountId> executed;
    for (const auto& tx : included) {
      included_hashes.insert(tx.hash);
      executed.insert(tx.sender);
      const auto it = tx_index_by_hash_.find(tx.hash);
      const bool attack = it != tx_index_by_hash_.end() && is_attack_[it->second];
      if (attack) {
        ++metrics_.attack_txs_in_block;
        const long double fee =
            static_cast<long double>(tx.gas_limit) * static_cast<long double>(tx.gas_price);
        metrics_.attack_cost_eth += static_cast<double>(fee / static_cast<long double>(kWeiPerEth));
      } else {
        ++metrics_.honest_included;
      }
    }
    // Only accounts that executed change state; everyone else's entries are
    // untouched by the update stage.
    std::map<txpool::AccountId, txpool::AccountState> touched;
    for (const txpool::AccountId id : executed) {
      chain_[id] = working.at(id);
      touched.emplace(id, working.at(id));
    }
    for (auto& node : nodes_) {
      if (node.spec.validation.update_stage_enabled)
        node.pool.update_on_block(included_hashes, touched);
    }
    return included.size();
  }

  void finalize_metrics() {
    if (!txpool_snapshot_taken_) snapshot_txpool_ratio();
    metrics_.honest_ratio_block =
        metrics_.honest_submitted == 0
            ? 1.0
            : static_cast<double>(metrics_.honest_included) /
                  static_cast<double>(metrics_.honest_submitted);
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      auto& traffic = metrics_.per_node[i];
      traffic.pool_size = static_cast<std::int64_t>(nodes_[i].pool.size());
      for (const auto& tx : nodes_[i].pool.snapshot()) {
        const auto it = tx_index_by_hash_.find(tx.hash);
        if (it != tx_index_by_hash_.end() && is_attack_[it->second]) ++traffic.pool_attack_txs;
      }
    }
  }

  const SimConfig& config_;
  ChainState chain_;
  TraceSink* trace_;
  std::mt19937_64 rng_;
  std::vector<NodeRuntime> nodes_;
  std::unordered_set<std::uint64_t> edge_set_;
  std::vector<txpool::Transaction> txs_;
  std::vector<bool> is_attack_;
  std::unordered_map<txpool::TxHash, std::uint32_t> tx_index_by_hash_;
  std::priority_queue<Event, std::vector<Event>, EventAfter> queue_;
  std::uint64_t next_seq_ = 0;
  std::size_t slots_run_ = 0;
  bool txpool_snapshot_taken_ = false;
  SimMetrics metrics_;
};

}  // namespace

SimMetrics run_simulation(const SimConfig& config, const std::vector<Submission>& workload,
                          ChainState initial_state, TraceSink* trace) {
  Simulation sim(config, workload, std::move(initial_state), trace);
  return sim.run();
}

namespace {

struct ScenarioAccounts {
  std::vector<Submission> workload;
  ChainState state;
};

constexpr txpool::AccountId kHonestBase = 1000;
constexpr txpool::AccountId kAttackBase = 500000;
constexpr txpool::Wei kGwei = 1'000'000'000ULL;
constexpr txpool::Wei kAttackGasPrice = 1000 * kGwei;
constexpr std::uint64_t kGasLimit = 21000;

ScenarioAccounts build_scenario_workload(AttackKind kind, const SimConfig& config) {
  ScenarioAccounts out;
  const int target = config.rpc_target_node;

  // Honest fill: per-account nonce chains at prices well under the attack's.
  double t = 0.0;
  for (int j = 0; j < config.honest_txs_each; ++j) {
    for (int i = 0; i < config.honest_accounts; ++i) {
      const txpool::AccountId sender = kHonestBase + static_cast<txpool::AccountId>(i);
      const txpool::Wei price = (10 + (static_cast<txpool::Wei>(i) * 31 + static_cast<txpool::Wei>(j) * 17) % 40) * kGwei;
      const auto tx = txpool::make_transaction(sender, static_cast<std::uint64_t>(j), kGasLimit,
                                               price, 0, 200);
      out.workload.push_back({t, target, tx, false});
      t += 0.01;
    }
  }
  for (int i = 0; i < config.honest_accounts; ++i) {
    const txpool::AccountId sender = kHonestBase + static_cast<txpool::AccountId>(i);
    const txpool::Wei per_tx = kGasLimit * 50 * kGwei;
    out.state[sender] = {per_tx * static_cast<txpool::Wei>(config.honest_txs_each + 1), 0};
  }

  // Attack wave arrives after the fill quiesces, before the first block.
  t = 2000.0;
  for (int i = 0; i < config.attack_accounts; ++i) {
    const txpool::AccountId sender = kAttackBase + static_cast<txpool::AccountId>(i);
    const txpool::Wei per_tx = kGasLimit * kAttackGasPrice;
    switch (kind) {
      case AttackKind::Baseline: {
        out.state[sender] = {per_tx * static_cast<txpool::Wei>(config.attack_txs_each + 1), 0};
        for (int j = 0; j < config.attack_txs_each; ++j) {
          const auto tx = txpool::make_transaction(sender, static_cast<std::uint64_t>(j),
                                                   kGasLimit, kAttackGasPrice, 0, 100);
          out.workload.push_back({t, target, tx, true});
          t += 0.01;
        }
        break;
      }
      case AttackKind::MemPurge: {
        // One payable anchor plus a future chain parked behind a nonce gap.
        out.state[sender] = {per_tx * 2, 0};
        const auto anchor =
            txpool::make_transaction(sender, 0, kGasLimit, kAttackGasPrice, 0, 100);
        out.workload.push_back({t, target, anchor, true});
        t += 0.01;
        for (int j = 0; j + 1 < config.attack_txs_each; ++j) {
          const auto tx = txpool::make_transaction(sender, static_cast<std::uint64_t>(j + 2),
                                                   kGasLimit, kAttackGasPrice, 0, 100);
          out.workload.push_back({t, target, tx, true});
          t += 0.01;
        }
        break;
      }
      case AttackKind::Amplification: {
        // Balance far below the transfer, nonces all spent already.
        const std::uint64_t history =
            static_cast<std::uint64_t>(config.attack_txs_each) + 8;
        out.state[sender] = {1000, history};
        for (int j = 0; j < config.attack_txs_each; ++j) {
          const auto tx = txpool::make_transaction(sender, static_cast<std::uint64_t>(j),
                                                   kGasLimit, kAttackGasPrice, kWeiPerEth, 100);
          out.workload.push_back({t, target, tx, true});
          t += 0.01;
        }
        break;
      }
    }
  }
  return out;
}

}  // namespace

SimMetrics run_attack_scenario(AttackKind kind, int attack_accounts, const SimConfig& base,
                               TraceSink* trace) {
  if (attack_accounts < 0) throw parameter_error("attack_accounts must be nonnegative");
  SimConfig config = base;
  config.attack_accounts = attack_accounts;
  if (config.nodes.empty()) config.nodes.push_back(NodeSpec::modified(0, 0));
  if (config.rpc_target_node < 0) config.rpc_target_node = 0;
  if (config.validator_node < 0) config.validator_node = config.rpc_target_node;
  ScenarioAccounts plan = build_scenario_workload(kind, config);
  return run_simulation(config, plan.workload, std::move(plan.state), trace);
}

std::vector<ScenarioOutcome> sweep_attack_scenario(AttackKind kind,
                                                   const std::vector<int>& account_counts,
                                                   const SimConfig& base) {
  std::vector<ScenarioOutcome> out;
  out.reserve(account_counts.size());
  for (const int accounts : account_counts)
    out.push_back({accounts, run_attack_scenario(kind, accounts, base)});
  return out;
}

double measure_taf(const SimConfig& config, double injected_tx_size) {
  if (injected_tx_size <= 0.0) throw parameter_error("injected_tx_size must be positive");
  int attacker = -1;
  for (const auto& node : config.nodes) {
    if (node.role == NodeRole::Attacker) {
      attacker = node.node_id;
      break;
    }
  }
  if (attacker < 0) throw configuration_error("measure_taf needs an attacker node");

  // A transfer no fresh account can pay for; sized to the requested bytes.
  const std::uint64_t size = static_cast<std::uint64_t>(std::llround(injected_tx_size));
  const std::uint64_t payload =
      size > txpool::kBaseEncodedSize ? size - txpool::kBaseEncodedSize : 0;
  const auto tx = txpool::make_transaction(987654321ULL, 0, kGasLimit, kAttackGasPrice,
                                           kWeiPerEth, payload, size);

  std::vector<Submission> workload{{0.0, attacker, tx, true}};
  const SimMetrics metrics = run_simulation(config, workload, {});

  std::uint64_t modified_out = 0;
  std::uint64_t attacker_out = 0;
  for (const auto& node : config.nodes) {
    const auto& traffic = metrics.per_node[static_cast<std::size_t>(node.node_id)];
    if (node.role == NodeRole::Modified) modified_out += traffic.bytes_out;
    if (node.role == NodeRole::Attacker) attacker_out += traffic.bytes_out;
  }
  if (attacker_out == 0) return 0.0;
  return static_cast<double>(modified_out) / static_cast<double>(attacker_out);
}

SimConfig make_eviction_config(int total_nodes, int degree, std::uint64_t seed) {
  if (total_nodes < 1) throw parameter_error("total_nodes must be at least 1");
  SimConfig config;
  config.seed = seed;
  config.nodes.reserve(static_cast<std::size_t>(total_nodes));
  NodeSpec target = NodeSpec::modified(0, total_nodes > 1 ? degree : 0);
  target.role = NodeRole::Validator;  // the attacked pool also builds blocks
  config.nodes.push_back(target);
  for (int i = 1; i < total_nodes; ++i) config.nodes.push_back(NodeSpec::regular(i, degree));
  config.validator_node = 0;
  config.rpc_target_node = 0;
  return config;
}

SimConfig make_taf_config(int total_nodes, int modified_count, int degree, std::uint64_t seed) {
  if (total_nodes < 2) throw parameter_error("total_nodes must be at least 2");
  if (modified_count < 1 || modified_count >= total_nodes)
    throw parameter_error("modified_count must lie in [1, total_nodes)");
  SimConfig config;
  config.seed = seed;
  const int clique = modified_count - 1;
  for (int i = 0; i < modified_count; ++i)
    config.nodes.push_back(NodeSpec::modified(i, std::max(degree - clique, 0) + clique));
  for (int i = modified_count; i < total_nodes; ++i)
    config.nodes.push_back(NodeSpec::regular(i, degree));
  const int attacker = total_nodes;
  config.nodes.push_back(NodeSpec::attacker(attacker));
  config.extra_edges.push_back({attacker, 0});
  return config;
}

SaturationCost traffic_saturation_cost(const SaturationInputs& inputs,
                                       const econ::PricingSchedule& schedule) {
  if (inputs.modified_nodes <= 0.0)
    throw parameter_error("saturation cost needs at least one modified node");
  if (inputs.modified_out_gb_per_s < 0.0 || inputs.regular_in_mb_per_s < 0.0)
    throw parameter_error("bandwidths must be nonnegative");
  if (inputs.external_share < 0.0 || inputs.external_share > 1.0)
    throw parameter_error("external share must lie in [0,1]");

  const double modified_tb_month =
      inputs.modified_out_gb_per_s * inputs.seconds_per_month / 1000.0;
  const double regular_aggregate_tb_month =
      inputs.regular_in_mb_per_s * inputs.regular_nodes * inputs.seconds_per_month / 1'000'000.0;

  SaturationCost out;
  out.effective_tb_per_node =
      std::min(modified_tb_month, regular_aggregate_tb_month / inputs.modified_nodes);
  out.per_node_usd = schedule.cost(inputs.external_share * out.effective_tb_per_node);
  out.aggregate_usd = out.per_node_usd * inputs.modified_nodes;
  return out;
}

}  // namespace txamp::simnet
