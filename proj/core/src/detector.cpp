#include "txamp/detector.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "txamp/io.hpp"

namespace txamp::detector {

namespace {

constexpr std::int64_t kMsPerDay = 86400000;
constexpr double kWeiPerEth = 1e18;

double median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  if (n % 2 == 1) return values[n / 2];
  return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

}  // namespace

const char* to_string(AttackClass cls) {
  switch (cls) {
    case AttackClass::Gas: return "gas";
    case AttackClass::Nonce: return "nonce";
    case AttackClass::Data: return "data";
    case AttackClass::Value: return "value";
    case AttackClass::InsufficientBalance: return "insufficient-balance";
    case AttackClass::PastNonce: return "past-nonce";
    case AttackClass::Unclassifiable: return "unclassifiable";
  }
  return "unknown";
}

ObservationLog::ObservationLog(std::vector<TxObservation> records) {
  std::sort(records.begin(), records.end(), [](const TxObservation& a, const TxObservation& b) {
    if (a.timestamp_ms != b.timestamp_ms) return a.timestamp_ms < b.timestamp_ms;
    if (a.tx_hash != b.tx_hash) return a.tx_hash < b.tx_hash;
    return a.source < b.source;
  });
  std::set<std::pair<std::string, std::string>> seen;
  std::set<std::string> sources;
  for (auto& rec : records) {
    if (!seen.insert({rec.tx_hash, rec.source}).second) continue;  // repetition
    sources.insert(rec.source);
    const auto first = first_seen_.find(rec.tx_hash);
    if (first == first_seen_.end()) first_seen_.emplace(rec.tx_hash, rec.timestamp_ms);
    if (rec.details && details_.count(rec.tx_hash) == 0) details_.emplace(rec.tx_hash, *rec.details);
    sources_of_[rec.tx_hash].push_back(rec.source);
    records_.push_back(std::move(rec));
  }
  for (auto& [hash, srcs] : sources_of_) std::sort(srcs.begin(), srcs.end());
  sources_.assign(sources.begin(), sources.end());

  // Group detailed transactions per sender, ordered by first sighting.
  std::map<std::string, std::vector<std::pair<std::int64_t, std::string>>> grouped;
  for (const auto& [hash, det] : details_)
    grouped[det.sender].emplace_back(first_seen_.at(hash), hash);
  for (auto& [sender, txs] : grouped) {
    std::sort(txs.begin(), txs.end());
    auto& out = by_sender_[sender];
    out.reserve(txs.size());
    for (auto& [ts, hash] : txs) out.push_back(std::move(hash));
  }
}

std::optional<std::int64_t> ObservationLog::first_seen_ms(const std::string& tx_hash) const {
  const auto it = first_seen_.find(tx_hash);
  if (it == first_seen_.end()) return std::nullopt;
  return it->second;
}

const ObsDetails* ObservationLog::details(const std::string& tx_hash) const {
  const auto it = details_.find(tx_hash);
  return it == details_.end() ? nullptr : &it->second;
}

std::vector<std::string> ObservationLog::sources_of(const std::string& tx_hash) const {
  const auto it = sources_of_.find(tx_hash);
  return it == sources_of_.end() ? std::vector<std::string>{} : it->second;
}

FileStateOracle FileStateOracle::from_file(const std::string& path) {
  FileStateOracle oracle;
  io::for_each_csv_row(path, [&](std::size_t line, const std::vector<std::string>& fields) {
    if (fields.size() != 4)
      throw parse_error(path, line,
                        "expected account, height, balance_wei, nonce; got " +
                            std::to_string(fields.size()) + " fields");
    oracle.add_row(fields[0], io::parse_int(fields[1], path, line),
                   io::parse_double(fields[2], path, line), io::parse_int(fields[3], path, line));
  });
  return oracle;
}

void FileStateOracle::add_row(const std::string& account, std::int64_t height, double balance_wei,
                              std::int64_t nonce) {
  rows_[account][height] = {balance_wei, nonce};
}

OracleAccountState FileStateOracle::get(const std::string& account, std::int64_t height) const {
  const auto it = rows_.find(account);
  if (it == rows_.end()) return {};
  const auto& per_height = it->second;
  auto hit = per_height.upper_bound(height);
  if (hit == per_height.begin()) return {};
  --hit;
  return hit->second;
}

std::map<std::string, bool> label_dropped(const ObservationLog& log,
                                          const std::vector<ChainRecord>& chain,
                                          double window_days,
                                          std::optional<std::int64_t> coverage_end_ms) {
  if (window_days < 0.0) throw parameter_error("window_days must be nonnegative");
  std::map<std::string, std::int64_t> inclusion;
  std::int64_t chain_max = 0;
  for (const auto& rec : chain) {
    const auto it = inclusion.find(rec.tx_hash);
    if (it == inclusion.end() || rec.inclusion_timestamp_ms < it->second)
      inclusion[rec.tx_hash] = rec.inclusion_timestamp_ms;
    chain_max = std::max(chain_max, rec.inclusion_timestamp_ms);
  }
  const std::int64_t coverage = coverage_end_ms.value_or(chain_max);
  const auto window_ms = static_cast<std::int64_t>(std::llround(window_days * kMsPerDay));

  std::map<std::string, bool> labels;
  std::set<std::string> labelled;
  for (const auto& rec : log.records()) {
    if (!labelled.insert(rec.tx_hash).second) continue;
    const std::int64_t first = *log.first_seen_ms(rec.tx_hash);
    const std::int64_t window_end = first + window_ms;
    const auto inc = inclusion.find(rec.tx_hash);
    if (inc != inclusion.end() && inc->second <= window_end) {
      labels[rec.tx_hash] = false;
      continue;
    }
    if (window_end > coverage)
      throw parameter_error("chain coverage ends at " + std::to_string(coverage) +
                            " ms but tx " + rec.tx_hash + " needs lookup through " +
                            std::to_string(window_end) + " ms");
    labels[rec.tx_hash] = true;
  }
  return labels;
}

namespace {

struct SenderTx {
  std::int64_t ts;
  std::string hash;
  bool dropped;
};

AttackInstance make_instance(const std::string& sender, const std::vector<SenderTx>& txs,
                             std::size_t begin, std::size_t end) {  // [begin, end]
  AttackInstance inst;
  inst.sender = sender;
  inst.start_ms = txs[begin].ts;
  inst.end_ms = txs[end].ts;
  for (std::size_t i = begin; i <= end; ++i) {
    inst.tx_hashes.push_back(txs[i].hash);
    if (txs[i].dropped) ++inst.dropped_count;
  }
  return inst;
}

bool qualifies(const std::vector<std::int64_t>& dropped_prefix, std::size_t begin,
               std::size_t end, const DetectorThresholds& t) {
  const auto count = static_cast<std::int64_t>(end - begin + 1);
  if (count <= t.min_txs) return false;
  const std::int64_t dropped = dropped_prefix[end + 1] - dropped_prefix[begin];
  return static_cast<double>(dropped) > t.min_dropped_fraction * static_cast<double>(count);
}

}  // namespace

std::vector<AttackInstance> detect_spam_instances(const ObservationLog& log,
                                                  const std::map<std::string, bool>& dropped,
                                                  const DetectorThresholds& thresholds) {
  std::vector<AttackInstance> instances;
  for (const auto& [sender, hashes] : log.by_sender()) {
    std::vector<SenderTx> txs;
    txs.reserve(hashes.size());
    for (const auto& hash : hashes) {
      const auto it = dropped.find(hash);
      txs.push_back({*log.first_seen_ms(hash), hash, it != dropped.end() && it->second});
    }
    const std::size_t n = txs.size();
    if (n == 0) continue;

    std::vector<std::int64_t> dropped_prefix(n + 1, 0);
    for (std::size_t i = 0; i < n; ++i)
      dropped_prefix[i + 1] = dropped_prefix[i] + (txs[i].dropped ? 1 : 0);

    // Maximal sliding windows: for each start, the longest stretch within
    // window_ms; collect the qualifying ones.
    struct Window {
      std::size_t begin, end;
    };
    std::vector<Window> qualifying;
    std::size_t j = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (j < i) j = i;
      while (j + 1 < n && txs[j + 1].ts - txs[i].ts <= thresholds.window_ms) ++j;
      if (qualifies(dropped_prefix, i, j, thresholds)) qualifying.push_back({i, j});
    }
    if (qualifying.empty()) continue;

    // Cluster overlapping qualifying windows.
    std::size_t cluster_begin = qualifying[0].begin;
    std::size_t cluster_end = qualifying[0].end;
    auto flush = [&](std::size_t begin, std::size_t end) {
      if (qualifies(dropped_prefix, begin, end, thresholds)) {
        instances.push_back(make_instance(sender, txs, begin, end));
        return;
      }
      // The union dilutes below a threshold: fall back to non-overlapping
      // qualifying windows, leftmost first.
      std::size_t next_free = begin;
      for (const auto& w : qualifying) {
        if (w.begin < next_free || w.begin < begin || w.end > end) continue;
        instances.push_back(make_instance(sender, txs, w.begin, w.end));
        next_free = w.end + 1;
      }
    };
    for (std::size_t k = 1; k < qualifying.size(); ++k) {
      if (qualifying[k].begin <= cluster_end) {
        cluster_end = std::max(cluster_end, qualifying[k].end);
      } else {
        flush(cluster_begin, cluster_end);
        cluster_begin = qualifying[k].begin;
        cluster_end = qualifying[k].end;
      }
    }
    flush(cluster_begin, cluster_end);
  }
  return instances;
}

AttackClass classify_instance(const ObservationLog& log, const AttackInstance& instance,
                              const StateOracle& oracle, std::int64_t slot_ms) {
  if (slot_ms <= 0) throw parameter_error("slot_ms must be positive");
  std::vector<const ObsDetails*> details;
  details.reserve(instance.tx_hashes.size());
  for (const auto& hash : instance.tx_hashes) {
    const ObsDetails* det = log.details(hash);
    if (det == nullptr) return AttackClass::Unclassifiable;
    details.push_back(det);
  }
  if (details.empty()) return AttackClass::Unclassifiable;

  // State two blocks before the burst was first seen.
  const std::int64_t height = instance.start_ms / slot_ms - 2;
  const OracleAccountState state = oracle.get(instance.sender, height);

  for (const ObsDetails* det : details) {
    const double cost = det->gas_limit * det->gas_price + det->value;
    if (state.balance_wei < cost) return AttackClass::InsufficientBalance;
  }
  for (const ObsDetails* det : details) {
    if (det->nonce < state.nonce) return AttackClass::PastNonce;
  }

  std::set<double> gas_limits, nonces, values;
  std::set<std::string> payloads;
  for (const ObsDetails* det : details) {
    gas_limits.insert(det->gas_limit);
    nonces.insert(static_cast<double>(det->nonce));
    payloads.insert(det->payload_digest);
    values.insert(det->value);
  }
  // Tie order: Gas > Nonce > Data > Value.
  const std::size_t counts[4] = {gas_limits.size(), nonces.size(), payloads.size(),
                                 values.size()};
  std::size_t best = 0;
  for (std::size_t i = 1; i < 4; ++i)
    if (counts[i] > counts[best]) best = i;
  switch (best) {
    case 0: return AttackClass::Gas;
    case 1: return AttackClass::Nonce;
    case 2: return AttackClass::Data;
    default: return AttackClass::Value;
  }
}

InstanceStats instance_stats(const ObservationLog& log, const AttackInstance& instance,
                             const std::vector<ChainRecord>& chain,
                             const std::map<std::int64_t, double>& usd_per_eth_by_day) {
  InstanceStats stats;
  std::map<std::string, const ChainRecord*> on_chain;
  for (const auto& rec : chain) on_chain.emplace(rec.tx_hash, &rec);

  double size_sum = 0.0;
  std::int64_t size_count = 0;
  std::vector<double> timestamps;
  std::set<std::string> victims;
  for (const auto& hash : instance.tx_hashes) {
    if (const ObsDetails* det = log.details(hash)) {
      size_sum += static_cast<double>(det->size_bytes);
      ++size_count;
    }
    if (const auto ts = log.first_seen_ms(hash)) timestamps.push_back(static_cast<double>(*ts));
    for (const auto& src : log.sources_of(hash)) victims.insert(src);
    const auto hit = on_chain.find(hash);
    if (hit == on_chain.end()) continue;
    ++stats.onchain_count;
    const ChainRecord& rec = *hit->second;
    const std::int64_t day = rec.inclusion_timestamp_ms / kMsPerDay;
    const auto price = usd_per_eth_by_day.find(day);
    if (price == usd_per_eth_by_day.end())
      throw parameter_error("price table does not cover epoch day " + std::to_string(day));
    const double fee_eth = rec.effective_gas_price * rec.gas_used / kWeiPerEth;
    stats.total_cost_usd += fee_eth * price->second;
  }
  stats.size_avg_bytes = size_count > 0 ? size_sum / static_cast<double>(size_count) : 0.0;
  stats.victim_count = static_cast<std::int64_t>(victims.size());

  std::sort(timestamps.begin(), timestamps.end());
  std::vector<double> gaps;
  for (std::size_t i = 1; i < timestamps.size(); ++i)
    gaps.push_back(timestamps[i] - timestamps[i - 1]);
  stats.median_interval_ms = median(std::move(gaps));
  return stats;
}

SourceComparison compare_sources(const ObservationLog& log,
                                 const std::map<std::string, bool>& dropped,
                                 std::int64_t bucket_ms) {
  if (bucket_ms <= 0) throw parameter_error("bucket_ms must be positive");
  SourceComparison out;
  out.sources = log.sources();
  std::map<std::string, std::size_t> source_index;
  for (std::size_t i = 0; i < out.sources.size(); ++i) source_index[out.sources[i]] = i;

  struct Bucket {
    std::vector<double> latencies;
    std::int64_t total = 0;
    std::int64_t dropped = 0;
  };
  std::map<std::pair<std::string, std::int64_t>, Bucket> buckets;
  std::map<std::string, std::vector<std::size_t>> dropped_sources;  // hash -> source indexes
  std::set<std::int64_t> days;

  for (const auto& rec : log.records()) {
    const std::int64_t first = *log.first_seen_ms(rec.tx_hash);
    days.insert(first / kMsPerDay);
    const std::int64_t bucket_start = (first / bucket_ms) * bucket_ms;
    Bucket& bucket = buckets[{rec.source, bucket_start}];
    bucket.total += 1;
    const auto lab = dropped.find(rec.tx_hash);
    const bool is_dropped = lab != dropped.end() && lab->second;
    if (is_dropped) {
      bucket.dropped += 1;
      dropped_sources[rec.tx_hash].push_back(source_index.at(rec.source));
    } else {
      // Latency is defined on transactions that made it on chain.
      bucket.latencies.push_back(static_cast<double>(rec.timestamp_ms - first));
    }
  }

  for (auto& [key, bucket] : buckets) {
    SourceBucketStats row;
    row.source = key.first;
    row.bucket_start_ms = key.second;
    row.total = bucket.total;
    row.dropped = bucket.dropped;
    row.dropped_ratio =
        bucket.total > 0 ? static_cast<double>(bucket.dropped) / static_cast<double>(bucket.total)
                         : 0.0;
    row.median_latency_ms = median(std::move(bucket.latencies));
    out.per_source.push_back(std::move(row));
  }

  out.observed_days = static_cast<std::int64_t>(days.size());
  const std::size_t n = out.sources.size();
  out.cooccurrence_per_day.assign(n, std::vector<double>(n, 0.0));
  for (const auto& [hash, indexes] : dropped_sources) {
    for (const std::size_t a : indexes)
      for (const std::size_t b : indexes) out.cooccurrence_per_day[a][b] += 1.0;
  }
  if (out.observed_days > 0) {
    for (auto& row : out.cooccurrence_per_day)
      for (double& cell : row) cell /= static_cast<double>(out.observed_days);
  }
  return out;
}

std::vector<TxObservation> read_observations(const std::string& path) {
  std::vector<TxObservation> out;
  io::for_each_csv_row(path, [&](std::size_t line, const std::vector<std::string>& fields) {
    if (fields.size() != 3 && fields.size() != 10)
      throw parse_error(path, line, "expected 3 or 10 observation fields, got " +
                                        std::to_string(fields.size()));
    TxObservation obs;
    obs.tx_hash = fields[0];
    obs.source = fields[1];
    obs.timestamp_ms = io::parse_int(fields[2], path, line);
    if (fields.size() == 10) {
      ObsDetails det;
      det.sender = fields[3];
      det.nonce = io::parse_int(fields[4], path, line);
      det.gas_limit = io::parse_double(fields[5], path, line);
      det.gas_price = io::parse_double(fields[6], path, line);
      det.value = io::parse_double(fields[7], path, line);
      det.payload_digest = fields[8];
      det.size_bytes = io::parse_int(fields[9], path, line);
      obs.details = std::move(det);
    }
    out.push_back(std::move(obs));
  });
  return out;
}

std::vector<ChainRecord> read_chain_records(const std::string& path) {
  std::vector<ChainRecord> out;
  io::for_each_csv_row(path, [&](std::size_t line, const std::vector<std::string>& fields) {
    if (fields.size() != 4)
      throw parse_error(path, line,
                        "expected tx_hash, inclusion_timestamp_ms, effective_gas_price, "
                        "gas_used; got " + std::to_string(fields.size()) + " fields");
    ChainRecord rec;
    rec.tx_hash = fields[0];
    rec.inclusion_timestamp_ms = io::parse_int(fields[1], path, line);
    rec.effective_gas_price = io::parse_double(fields[2], path, line);
    rec.gas_used = io::parse_double(fields[3], path, line);
    out.push_back(std::move(rec));
  });
  return out;
}

std::map<std::int64_t, double> read_price_table(const std::string& path) {
  std::map<std::int64_t, double> out;
  io::for_each_csv_row(path, [&](std::size_t line, const std::vector<std::string>& fields) {
    if (fields.size() != 2)
      throw parse_error(path, line, "expected date, usd_per_eth");
    out[io::parse_date_to_epoch_day(fields[0], path, line)] =
        io::parse_double(fields[1], path, line);
  });
  return out;
}

}  // namespace txamp::detector
