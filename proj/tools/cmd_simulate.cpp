#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include "commands.hpp"
#include "report_util.hpp"
#include "txamp/model.hpp"
#include "txamp/simnet.hpp"

namespace txamp::cli {

namespace {

std::vector<int> parse_sweep(const std::string& raw) {
  // "start:stop:step"
  int start = 0, stop = 0, step = 1;
  char c1 = 0, c2 = 0;
  std::stringstream ss(raw);
  if (!(ss >> start >> c1 >> stop >> c2 >> step) || c1 != ':' || c2 != ':' || step <= 0)
    throw parameter_error("sim.sweep must be start:stop:step, got '" + raw + "'");
  std::vector<int> points;
  for (int x = start; x <= stop; x += step) points.push_back(x);
  return points;
}

simnet::AttackKind kind_from_name(const std::string& name) {
  if (name == "baseline") return simnet::AttackKind::Baseline;
  if (name == "mempurge") return simnet::AttackKind::MemPurge;
  if (name == "amplification") return simnet::AttackKind::Amplification;
  throw parameter_error("unknown scenario '" + name + "'");
}

// Message-log sink in the estimation pipeline's input format. Non-regular
// nodes are labelled with a non-public commit, the way customized clients
// show up in the wild.
class FileTraceSink : public simnet::TraceSink {
 public:
  FileTraceSink(const std::filesystem::path& path, std::set<int> monitors)
      : out_(path, std::ios::trunc), monitors_(std::move(monitors)) {
    if (!out_) throw parse_error(path.string(), 0, "cannot open trace file");
    out_ << "# timestamp_ms, monitor_id, peer_id, msg_type, tx_hash, tx_size_bytes\n";
  }

  void on_message(std::int64_t timestamp_ms, int receiver, int sender, int msg_type,
                  txpool::TxHash tx_hash, std::uint64_t size_bytes) override {
    if (!monitors_.empty() && monitors_.count(receiver) == 0) return;
    out_ << timestamp_ms << ",monitor-" << receiver << ",node-" << sender << ",0" << msg_type
         << ',' << std::hex << tx_hash << std::dec << ',' << size_bytes << '\n';
  }

 private:
  std::ofstream out_;
  std::set<int> monitors_;
};

void write_peer_metadata(const std::filesystem::path& dir, const simnet::SimConfig& config) {
  std::vector<std::vector<std::string>> peer_rows;
  for (const auto& node : config.nodes) {
    const bool stock = node.role == simnet::NodeRole::Regular;
    const std::string name = stock ? "Geth/v1.13.4-stable-3f907d6a/linux-amd64/go1.21.3"
                                   : "Geth/v1.13.4-stable-0badc0de/linux-amd64/go1.21.3";
    peer_rows.push_back({"node-" + std::to_string(node.node_id), name, "add", "0"});
  }
  write_csv(dir / "trace_peers.csv", {"peer_id", "node_name", "event", "timestamp_ms"},
            peer_rows);
  std::ofstream allow(dir / "trace_allowlist.csv", std::ios::trunc);
  allow << "3f907d6a\n";
}

int run_taf_mode(const Config& cfg, const std::filesystem::path& dir, std::uint64_t seed) {
  const int total_nodes = static_cast<int>(cfg.get_int("sim.nodes", 600));
  const int modified_count = static_cast<int>(cfg.get_int("sim.modified_count", 9));
  const int degree = static_cast<int>(cfg.get_int("sim.degree", 41));
  const double tx_size = cfg.get_double("sim.tx_size", 560.0);

  simnet::SimConfig config = simnet::make_taf_config(total_nodes, modified_count, degree, seed);
  const double simulated = simnet::measure_taf(config, tx_size);

  model::AmplificationParams params;
  params.tx_size = tx_size;
  params.modified_ratio = static_cast<double>(modified_count) / total_nodes;
  params.policy = model::PropagationPolicy::aggressive();
  params.total_nodes = total_nodes;
  const double analytic =
      model::taf(params, model::ConnectionDistribution::point_mass(degree));

  OrderedJson doc;
  doc["nodes"] = total_nodes;
  doc["modified_count"] = modified_count;
  doc["degree"] = degree;
  doc["tx_size"] = sig(tx_size);
  doc["taf_simulated"] = sig(simulated);
  doc["taf_model"] = sig(analytic);
  doc["ratio"] = sig(analytic > 0.0 ? simulated / analytic : 0.0);
  write_json(dir / "taf.json", doc);
  return 0;
}

}  // namespace

int cmd_simulate(const Config& cfg, const std::string& out_dir) {
  const auto dir = ensure_out_dir(out_dir);
  const auto seed = static_cast<std::uint64_t>(cfg.get_int("sim.seed", cfg.get_int("seed", 1)));
  const std::string scenario = cfg.get_string("sim.scenario", "amplification");
  if (scenario == "taf") return run_taf_mode(cfg, dir, seed);

  const simnet::AttackKind kind = kind_from_name(scenario);
  simnet::SimConfig base = simnet::make_eviction_config(
      static_cast<int>(cfg.get_int("sim.nodes", 600)),
      static_cast<int>(cfg.get_int("sim.degree", 6)), seed);
  base.block_tx_budget = static_cast<std::size_t>(cfg.get_int("sim.block_budget", 128));
  base.slot_seconds = cfg.get_double("sim.slot_seconds", 12.0);
  base.honest_accounts = static_cast<int>(cfg.get_int("sim.honest_accounts", 80));
  base.honest_txs_each = static_cast<int>(cfg.get_int("sim.honest_txs_each", 64));
  base.attack_txs_each = static_cast<int>(cfg.get_int("sim.attack_txs_each", 32));
  const auto capacity = static_cast<std::size_t>(cfg.get_int("sim.capacity", 5120));
  for (auto& node : base.nodes) node.pool_capacity = capacity;

  std::vector<int> points;
  if (cfg.has("sim.attack_accounts")) {
    points.push_back(static_cast<int>(cfg.get_int("sim.attack_accounts")));
  } else {
    points = parse_sweep(cfg.get_string("sim.sweep", "0:400:40"));
  }

  const auto outcomes = simnet::sweep_attack_scenario(kind, points, base);

  std::vector<std::vector<std::string>> rows;
  for (const auto& outcome : outcomes) {
    const auto& m = outcome.metrics;
    rows.push_back({std::to_string(outcome.attack_accounts), fmt(m.honest_ratio_txpool),
                    fmt(m.honest_ratio_block), std::to_string(m.attack_txs_in_block),
                    fmt(m.attack_cost_eth), std::to_string(m.honest_submitted),
                    std::to_string(m.honest_included), std::to_string(m.attack_submitted),
                    std::to_string(m.blocks_produced), std::to_string(m.broadcast_msgs),
                    std::to_string(m.announce_msgs), std::to_string(m.total_bytes_sent)});
  }
  write_csv(dir / "metrics.csv",
            {"attack_accounts", "honest_ratio_txpool", "honest_ratio_block",
             "attack_txs_in_block", "attack_cost_eth", "honest_submitted", "honest_included",
             "attack_submitted", "blocks_produced", "broadcast_msgs", "announce_msgs",
             "total_bytes_sent"},
            rows);

  OrderedJson summary;
  summary["scenario"] = scenario;
  summary["nodes"] = base.nodes.size();
  summary["seed"] = seed;
  summary["sweep_points"] = outcomes.size();
  if (!outcomes.empty()) {
    const auto& last = outcomes.back().metrics;
    OrderedJson end;
    end["attack_accounts"] = outcomes.back().attack_accounts;
    end["honest_ratio_txpool"] = sig(last.honest_ratio_txpool);
    end["honest_ratio_block"] = sig(last.honest_ratio_block);
    end["attack_txs_in_block"] = last.attack_txs_in_block;
    end["attack_cost_eth"] = sig(last.attack_cost_eth);
    summary["final_point"] = end;
  }
  write_json(dir / "summary.json", summary);

  // optional gossip trace of a rerun at a fixed sweep point, in the
  // estimation pipeline's log format
  if (cfg.get_bool("sim.trace", false)) {
    const int trace_point = static_cast<int>(cfg.get_int("sim.trace_accounts", points.back()));
    std::set<int> monitors;
    if (cfg.has("sim.monitors"))
      for (double m : cfg.get_double_list("sim.monitors")) monitors.insert(static_cast<int>(m));
    FileTraceSink sink(dir / "trace_messages.csv", monitors);
    simnet::run_attack_scenario(kind, trace_point, base, &sink);
    write_peer_metadata(dir, base);
  }
  return 0;
}

}  // namespace txamp::cli
