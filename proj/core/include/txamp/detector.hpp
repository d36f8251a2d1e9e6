#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "txamp/errors.hpp"

namespace txamp::detector {

struct ObsDetails {
  std::string sender;
  std::int64_t nonce = 0;
  double gas_limit = 0.0;
  double gas_price = 0.0;  // wei
  double value = 0.0;      // wei
  std::string payload_digest;
  std::int64_t size_bytes = 0;
};

struct TxObservation {
  std::string tx_hash;
  std::string source;
  std::int64_t timestamp_ms = 0;
  std::optional<ObsDetails> details;
};

struct ChainRecord {
  std::string tx_hash;
  std::int64_t inclusion_timestamp_ms = 0;
  double effective_gas_price = 0.0;  // wei
  double gas_used = 0.0;
};

enum class AttackClass {
  Gas,
  Nonce,
  Data,
  Value,
  InsufficientBalance,
  PastNonce,
  Unclassifiable,
};

const char* to_string(AttackClass cls);

struct InstanceStats {
  double size_avg_bytes = 0.0;
  std::int64_t onchain_count = 0;
  double total_cost_usd = 0.0;
  double median_interval_ms = 0.0;
  std::int64_t victim_count = 0;
};

struct AttackInstance {
  std::string sender;
  std::int64_t start_ms = 0;
  std::int64_t end_ms = 0;
  std::vector<std::string> tx_hashes;  // ordered by first observation
  std::int64_t dropped_count = 0;
  AttackClass classification = AttackClass::Unclassifiable;
  InstanceStats stats;
};

// Deduplicated observation corpus: only the first record per (tx, source)
// is retained, and windowing works on each transaction's earliest sighting.
class ObservationLog {
 public:
  explicit ObservationLog(std::vector<TxObservation> records);

  const std::vector<TxObservation>& records() const { return records_; }
  const std::vector<std::string>& sources() const { return sources_; }

  // Earliest timestamp any source saw the hash; empty if unknown.
  std::optional<std::int64_t> first_seen_ms(const std::string& tx_hash) const;
  const ObsDetails* details(const std::string& tx_hash) const;
  std::vector<std::string> sources_of(const std::string& tx_hash) const;

  // tx hashes with details, grouped by sender, ordered by first sighting.
  const std::map<std::string, std::vector<std::string>>& by_sender() const { return by_sender_; }

 private:
  std::vector<TxObservation> records_;
  std::vector<std::string> sources_;
  std::map<std::string, std::int64_t> first_seen_;
  std::map<std::string, ObsDetails> details_;
  std::map<std::string, std::vector<std::string>> sources_of_;
  std::map<std::string, std::vector<std::string>> by_sender_;
};

// Account state as a chain oracle reports it.
struct OracleAccountState {
  double balance_wei = 0.0;
  std::int64_t nonce = 0;
};

class StateOracle {
 public:
  virtual ~StateOracle() = default;
  virtual OracleAccountState get(const std::string& account, std::int64_t block_height) const = 0;
};

// Backed by rows of `account, height, balance_wei, nonce`; a lookup returns
// the latest row at or below the requested height (zeros before the first).
class FileStateOracle : public StateOracle {
 public:
  static FileStateOracle from_file(const std::string& path);
  void add_row(const std::string& account, std::int64_t height, double balance_wei,
               std::int64_t nonce);
  OracleAccountState get(const std::string& account, std::int64_t height) const override;

 private:
  std::map<std::string, std::map<std::int64_t, OracleAccountState>> rows_;
};

// dropped(tx) <=> the chain does not include tx within `window_days` of its
// first sighting. Throws when the chain data cannot decide a label
// (coverage ends before an unobserved tx's window does).
std::map<std::string, bool> label_dropped(const ObservationLog& log,
                                          const std::vector<ChainRecord>& chain,
                                          double window_days = 7.0,
                                          std::optional<std::int64_t> coverage_end_ms = {});

struct DetectorThresholds {
  std::int64_t window_ms = 12000;
  std::int64_t min_txs = 100;        // strict: instances need more than this
  double min_dropped_fraction = 0.95;  // strict: instances need more than this
};

// Sliding per-sender windows; overlapping qualifying windows merge into one
// instance when the union still satisfies both thresholds, otherwise the
// qualifying windows are emitted greedily without overlap.
std::vector<AttackInstance> detect_spam_instances(const ObservationLog& log,
                                                  const std::map<std::string, bool>& dropped,
                                                  const DetectorThresholds& thresholds = {});

// Oracle state is read two blocks before the first sighting. Priority:
// insufficient balance, past nonce, then the most-varied duplicate field
// with ties broken Gas > Nonce > Data > Value.
AttackClass classify_instance(const ObservationLog& log, const AttackInstance& instance,
                              const StateOracle& oracle, std::int64_t slot_ms = 12000);

// Average size, on-chain count, fee cost in USD (price looked up on the
// inclusion day), median inter-arrival gap, count of accepting sources.
InstanceStats instance_stats(const ObservationLog& log, const AttackInstance& instance,
                             const std::vector<ChainRecord>& chain,
                             const std::map<std::int64_t, double>& usd_per_eth_by_day);

struct SourceBucketStats {
  std::string source;
  std::int64_t bucket_start_ms = 0;
  double median_latency_ms = 0.0;
  double dropped_ratio = 0.0;
  std::int64_t total = 0;
  std::int64_t dropped = 0;
};

struct SourceComparison {
  std::vector<SourceBucketStats> per_source;
  std::vector<std::string> sources;
  // dropped transactions common to both sources, averaged per observed day
  std::vector<std::vector<double>> cooccurrence_per_day;
  std::int64_t observed_days = 0;
};

// Latency relative to the earliest sighting (on-chain transactions only),
// dropped ratio per source per bucket, and the dropped co-occurrence matrix.
SourceComparison compare_sources(const ObservationLog& log,
                                 const std::map<std::string, bool>& dropped,
                                 std::int64_t bucket_ms = 7LL * 86400000LL);

// io for the detector record formats
std::vector<TxObservation> read_observations(const std::string& path);
std::vector<ChainRecord> read_chain_records(const std::string& path);
std::map<std::int64_t, double> read_price_table(const std::string& path);

}  // namespace txamp::detector
