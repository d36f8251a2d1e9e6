#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "txamp/errors.hpp"

namespace txamp::txpool {

using AccountId = std::uint64_t;
using Wei = std::uint64_t;
using TxHash = std::uint64_t;

// Bytes of a minimal encoded transfer; payload comes on top.
inline constexpr std::uint64_t kBaseEncodedSize = 110;

struct Transaction {
  TxHash hash = 0;  // digest of every other field; stands in for re-signing
  AccountId sender = 0;
  std::uint64_t nonce = 0;
  std::uint64_t gas_limit = 21000;
  Wei gas_price = 0;
  Wei value = 0;
  std::uint64_t payload_size = 0;
  std::uint64_t total_size = kBaseEncodedSize;
  std::uint64_t payload_tag = 0;  // stand-in for data-field content, not serialized

  // gas_limit * gas_price + value, without overflow.
  unsigned __int128 max_cost() const {
    return static_cast<unsigned __int128>(gas_limit) * gas_price + value;
  }
};

// Builds a transaction and stamps its hash. total_size defaults to the
// minimal encoding plus the payload.
Transaction make_transaction(AccountId sender, std::uint64_t nonce, std::uint64_t gas_limit,
                             Wei gas_price, Wei value, std::uint64_t payload_size = 0,
                             std::uint64_t total_size = 0, std::uint64_t payload_tag = 0);

TxHash transaction_digest(const Transaction& tx);

struct AccountState {
  Wei balance = 0;
  std::uint64_t nonce = 0;
};

struct ValidationPolicy {
  bool check_stateless = true;
  bool check_balance = true;
  bool check_nonce = true;
  int gas_bump_percent = 10;  // 0 disables the rule; duplicates then coexist
  std::uint64_t max_tx_size = 131072;
  bool update_stage_enabled = true;
  std::uint64_t future_nonce_gap = 64;

  static ValidationPolicy regular() { return {}; }
  static ValidationPolicy modified() {
    ValidationPolicy p;
    p.check_balance = false;
    p.check_nonce = false;
    p.gas_bump_percent = 0;
    return p;
  }
};

enum class RejectReason {
  Oversize,
  InsufficientBalance,
  PastNonce,
  FutureNonceGap,
  Underpriced,
};

const char* to_string(RejectReason reason);

struct ValidationResult {
  bool accepted = false;
  RejectReason reason = RejectReason::Oversize;

  static ValidationResult accept() { return {true, RejectReason::Oversize}; }
  static ValidationResult reject(RejectReason r) { return {false, r}; }
};

enum class InsertOutcome { Inserted, Replaced, EvictedOther, RejectedFull };

struct InsertResult {
  InsertOutcome outcome = InsertOutcome::Inserted;
  std::optional<Transaction> displaced;  // replaced entry or evicted victim
};

// Bounded transaction buffer. Entries are keyed by hash; a (sender, nonce)
// index drives the replacement rule and per-sender iteration. When full, an
// incoming executable transaction evicts the globally cheapest entry (ties:
// oldest) if it pays strictly more; future-nonce transactions never evict a
// resident entry and are pushed back instead.
class TxPool {
 public:
  explicit TxPool(std::size_t capacity = 5120, int gas_bump_percent = 10);

  std::size_t size() const { return entries_.size(); }
  std::size_t capacity() const { return capacity_; }
  int gas_bump_percent() const { return gas_bump_percent_; }

  bool contains(TxHash hash) const { return entries_.count(hash) != 0; }
  const Transaction* find(TxHash hash) const;

  // Highest-priced resident entry at (sender, nonce), if any.
  const Transaction* replacement_target(AccountId sender, std::uint64_t nonce) const;

  // Pre: tx passed validate() for the owning node's policy.
  InsertResult insert(const Transaction& tx, const AccountState& sender_state);

  // Removes included transactions and entries invalidated by the new account
  // states (past nonce, unaffordable). Returns the removal count. Queued
  // entries whose gap closed become executable implicitly.
  std::size_t update_on_block(const std::unordered_set<TxHash>& included,
                              const std::map<AccountId, AccountState>& new_state);

  bool erase(TxHash hash);

  // Nonce the sender's executable run extends to, starting from
  // state_nonce and walking contiguous pool entries.
  std::uint64_t executable_frontier(AccountId sender, std::uint64_t state_nonce) const;

  // True when the transaction cannot execute before other, missing nonces.
  bool is_queued(const Transaction& tx, const AccountState& state) const;

  std::vector<AccountId> senders() const;                 // sorted
  std::vector<Transaction> sender_txs(AccountId) const;   // nonce-ascending
  std::vector<Transaction> snapshot() const;              // insertion order

 private:
  struct Entry {
    Transaction tx;
    std::uint64_t seq;  // insertion order, breaks eviction ties
  };
  struct EvictKey {
    Wei gas_price;
    std::uint64_t seq;
    TxHash hash;
    bool operator<(const EvictKey& o) const {
      if (gas_price != o.gas_price) return gas_price < o.gas_price;
      if (seq != o.seq) return seq < o.seq;
      return hash < o.hash;
    }
  };

  void emplace(const Transaction& tx);
  void remove_entry(TxHash hash);

  std::size_t capacity_;
  int gas_bump_percent_;
  std::uint64_t next_seq_ = 0;
  std::unordered_map<TxHash, Entry> entries_;
  std::map<EvictKey, TxHash> by_price_;  // min first
  std::map<AccountId, std::multimap<std::uint64_t, TxHash>> by_sender_;
};

// Ordered validation: Oversize, InsufficientBalance, PastNonce (with the
// future gap), Underpriced. First failure wins; rejection is a result.
ValidationResult validate(const Transaction& tx, const AccountState& state,
                          const ValidationPolicy& policy, const TxPool& pool);

enum class ForgeKind { InsufficientBalance, PastNonce, Duplication };
enum class VaryField { GasLimit, Nonce, DataField, Value };

struct ForgeStrategy {
  ForgeKind kind = ForgeKind::InsufficientBalance;
  std::size_t count = 1;
  VaryField vary = VaryField::DataField;  // Duplication only
};

// Produces transactions that can never land on chain: fresh zero-balance
// senders, reused nonces below the account's current one, or same-key
// duplicates differing in a single field (and therefore in hash).
std::vector<Transaction> forge_invalid(const ForgeStrategy& strategy, const Transaction& base,
                                       const AccountState& state_view);

struct ValidationLatencyConstants {
  double stateless_ms = 0.08;
  double stateful_ms = 0.89;
};

// Per-transaction validation cost of the enabled stages. One state lookup
// covers both balance and nonce, so the stateful charge applies once.
double validation_latency(const ValidationPolicy& policy,
                          const ValidationLatencyConstants& constants = {});

// Fixture/replay format: hash, sender, nonce, gas_limit, gas_price, value,
// payload_size, total_size.
std::string serialize_transaction(const Transaction& tx);
Transaction parse_transaction(const std::vector<std::string>& fields, const std::string& path,
                              std::size_t line);

}  // namespace txamp::txpool
