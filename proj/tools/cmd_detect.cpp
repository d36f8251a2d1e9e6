#include <map>
#include <string>

#include "commands.hpp"
#include "report_util.hpp"
#include "txamp/detector.hpp"

namespace txamp::cli {

int cmd_detect(const Config& cfg, const std::string& out_dir) {
  using namespace detector;
  const auto dir = ensure_out_dir(out_dir);

  const ObservationLog log(read_observations(cfg.get_string("detect.observations")));
  const auto chain = read_chain_records(cfg.get_string("detect.chain"));
  const auto prices = read_price_table(cfg.get_string("detect.prices"));
  const FileStateOracle oracle = FileStateOracle::from_file(cfg.get_string("detect.state"));

  const double window_days = cfg.get_double("detect.window_days", 7.0);
  std::optional<std::int64_t> coverage;
  if (cfg.has("detect.coverage_end_ms")) coverage = cfg.get_int("detect.coverage_end_ms");
  const auto labels = label_dropped(log, chain, window_days, coverage);

  DetectorThresholds thresholds;
  thresholds.window_ms = cfg.get_int("detect.window_ms", 12000);
  thresholds.min_txs = cfg.get_int("detect.min_txs", 100);
  thresholds.min_dropped_fraction = cfg.get_double("detect.min_dropped_fraction", 0.95);
  auto instances = detect_spam_instances(log, labels, thresholds);

  const std::int64_t slot_ms = cfg.get_int("detect.slot_ms", 12000);
  OrderedJson instance_docs = OrderedJson::array();
  struct Row {
    std::int64_t cases = 0;
    std::map<std::string, bool> addresses;
    double txs = 0, onchain = 0, cost = 0, interval = 0, size = 0, victims = 0;
  };
  std::map<std::string, Row> by_class;

  for (auto& inst : instances) {
    inst.classification = classify_instance(log, inst, oracle, slot_ms);
    inst.stats = instance_stats(log, inst, chain, prices);

    OrderedJson doc;
    doc["sender"] = inst.sender;
    doc["start_ms"] = inst.start_ms;
    doc["end_ms"] = inst.end_ms;
    doc["classification"] = to_string(inst.classification);
    doc["tx_count"] = inst.tx_hashes.size();
    doc["dropped_count"] = inst.dropped_count;
    OrderedJson stats;
    stats["size_avg_bytes"] = sig(inst.stats.size_avg_bytes);
    stats["onchain_count"] = inst.stats.onchain_count;
    stats["total_cost_usd"] = sig(inst.stats.total_cost_usd);
    stats["median_interval_ms"] = sig(inst.stats.median_interval_ms);
    stats["victim_count"] = inst.stats.victim_count;
    doc["stats"] = stats;
    doc["tx_hashes"] = inst.tx_hashes;
    instance_docs.push_back(doc);

    Row& row = by_class[to_string(inst.classification)];
    row.cases += 1;
    row.addresses[inst.sender] = true;
    row.txs += static_cast<double>(inst.tx_hashes.size());
    row.onchain += static_cast<double>(inst.stats.onchain_count);
    row.cost += inst.stats.total_cost_usd;
    row.interval += inst.stats.median_interval_ms;
    row.size += inst.stats.size_avg_bytes;
    row.victims += static_cast<double>(inst.stats.victim_count);
  }
  write_json(dir / "instances.json", instance_docs);

  std::vector<std::vector<std::string>> summary_rows;
  for (const auto& [cls, row] : by_class) {
    const double n = static_cast<double>(row.cases);
    summary_rows.push_back({cls, std::to_string(row.cases),
                            std::to_string(row.addresses.size()), fmt(row.txs / n),
                            fmt(row.onchain / n), fmt(row.cost / n), fmt(row.interval / n),
                            fmt(row.size / n), fmt(row.victims / n)});
  }
  write_csv(dir / "summary.csv",
            {"type", "cases", "addresses", "txs_avg", "onchain_avg", "cost_usd_avg",
             "interval_ms_avg", "size_bytes_avg", "victims_avg"},
            summary_rows);

  const std::int64_t bucket_ms = cfg.get_int("detect.bucket_days", 7) * 86400000LL;
  const SourceComparison cmp = compare_sources(log, labels, bucket_ms);
  std::vector<std::vector<std::string>> source_rows;
  for (const auto& row : cmp.per_source) {
    source_rows.push_back({row.source, std::to_string(row.bucket_start_ms),
                           fmt(row.median_latency_ms), fmt(row.dropped_ratio),
                           std::to_string(row.total), std::to_string(row.dropped)});
  }
  write_csv(dir / "sources.csv",
            {"source", "bucket_start_ms", "median_latency_ms", "dropped_ratio", "total",
             "dropped"},
            source_rows);

  std::vector<std::string> header{"source"};
  header.insert(header.end(), cmp.sources.begin(), cmp.sources.end());
  std::vector<std::vector<std::string>> matrix_rows;
  for (std::size_t i = 0; i < cmp.sources.size(); ++i) {
    std::vector<std::string> row{cmp.sources[i]};
    for (std::size_t j = 0; j < cmp.sources.size(); ++j)
      row.push_back(fmt(cmp.cooccurrence_per_day[i][j]));
    matrix_rows.push_back(std::move(row));
  }
  write_csv(dir / "cooccurrence.csv", header, matrix_rows);

  OrderedJson summary;
  summary["observations"] = log.records().size();
  summary["labelled"] = labels.size();
  std::int64_t dropped_total = 0;
  for (const auto& [hash, is_dropped] : labels) dropped_total += is_dropped ? 1 : 0;
  summary["dropped"] = dropped_total;
  summary["instances"] = instances.size();
  summary["observed_days"] = cmp.observed_days;
  write_json(dir / "detect_summary.json", summary);
  return 0;
}

}  // namespace txamp::cli
