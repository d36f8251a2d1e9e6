#include "txamp/txpool.hpp"

#include <algorithm>
#include <sstream>

#include "txamp/io.hpp"

namespace txamp::txpool {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t mix(std::uint64_t h, std::uint64_t v) { return splitmix64(h ^ splitmix64(v)); }

}  // namespace

TxHash transaction_digest(const Transaction& tx) {
  std::uint64_t h = 0x7478616d70ULL;  // seed
  h = mix(h, tx.sender);
  h = mix(h, tx.nonce);
  h = mix(h, tx.gas_limit);
  h = mix(h, tx.gas_price);
  h = mix(h, tx.value);
  h = mix(h, tx.payload_size);
  h = mix(h, tx.total_size);
  h = mix(h, tx.payload_tag);
  return h;
}

Transaction make_transaction(AccountId sender, std::uint64_t nonce, std::uint64_t gas_limit,
                             Wei gas_price, Wei value, std::uint64_t payload_size,
                             std::uint64_t total_size, std::uint64_t payload_tag) {
  Transaction tx;
  tx.sender = sender;
  tx.nonce = nonce;
  tx.gas_limit = gas_limit;
  tx.gas_price = gas_price;
  tx.value = value;
  tx.payload_size = payload_size;
  tx.total_size = total_size == 0 ? kBaseEncodedSize + payload_size
                                  : std::max(total_size, kBaseEncodedSize + payload_size);
  tx.payload_tag = payload_tag;
  tx.hash = transaction_digest(tx);
  return tx;
}

const char* to_string(RejectReason reason) {
  switch (reason) {
    case RejectReason::Oversize: return "oversize";
    case RejectReason::InsufficientBalance: return "insufficient-balance";
    case RejectReason::PastNonce: return "past-nonce";
    case RejectReason::FutureNonceGap: return "future-nonce-gap";
    case RejectReason::Underpriced: return "underpriced";
  }
  return "unknown";
}

TxPool::TxPool(std::size_t capacity, int gas_bump_percent)
    : capacity_(capacity), gas_bump_percent_(gas_bump_percent) {
  if (capacity_ == 0) throw parameter_error("pool capacity must be positive");
  if (gas_bump_percent_ < 0) throw parameter_error("gas bump percent must be nonnegative");
}

const Transaction* TxPool::find(TxHash hash) const {
  const auto it = entries_.find(hash);
  return it == entries_.end() ? nullptr : &it->second.tx;
}

const Transaction* TxPool::replacement_target(AccountId sender, std::uint64_t nonce) const {
  const auto sit = by_sender_.find(sender);
  if (sit == by_sender_.end()) return nullptr;
  const auto [lo, hi] = sit->second.equal_range(nonce);
  const Transaction* best = nullptr;
  for (auto it = lo; it != hi; ++it) {
    const Transaction& tx = entries_.at(it->second).tx;
    if (best == nullptr || tx.gas_price > best->gas_price) best = &tx;
  }
  return best;
}

void TxPool::emplace(const Transaction& tx) {
  const std::uint64_t seq = next_seq_++;
  entries_.emplace(tx.hash, Entry{tx, seq});
  by_price_.emplace(EvictKey{tx.gas_price, seq, tx.hash}, tx.hash);
  by_sender_[tx.sender].emplace(tx.nonce, tx.hash);
}

void TxPool::remove_entry(TxHash hash) {
  const auto it = entries_.find(hash);
  if (it == entries_.end()) return;
  const Entry& entry = it->second;
  by_price_.erase(EvictKey{entry.tx.gas_price, entry.seq, hash});
  auto sit = by_sender_.find(entry.tx.sender);
  if (sit != by_sender_.end()) {
    const auto [lo, hi] = sit->second.equal_range(entry.tx.nonce);
    for (auto nit = lo; nit != hi; ++nit) {
      if (nit->second == hash) {
        sit->second.erase(nit);
        break;
      }
    }
    if (sit->second.empty()) by_sender_.erase(sit);
  }
  entries_.erase(it);
}

bool TxPool::erase(TxHash hash) {
  if (!contains(hash)) return false;
  remove_entry(hash);
  return true;
}

InsertResult TxPool::insert(const Transaction& tx, const AccountState& sender_state) {
  if (gas_bump_percent_ > 0) {
    if (const Transaction* existing = replacement_target(tx.sender, tx.nonce)) {
      Transaction old = *existing;
      remove_entry(old.hash);
      emplace(tx);
      return {InsertOutcome::Replaced, old};
    }
  }
  if (entries_.size() < capacity_) {
    emplace(tx);
    return {InsertOutcome::Inserted, std::nullopt};
  }
  if (is_queued(tx, sender_state)) {
    // Future transactions are pushed back rather than displacing residents.
    return {InsertOutcome::RejectedFull, std::nullopt};
  }
  const auto cheapest = by_price_.begin();
  const Transaction victim = entries_.at(cheapest->second).tx;
  if (tx.gas_price > victim.gas_price) {
    remove_entry(victim.hash);
    emplace(tx);
    return {InsertOutcome::EvictedOther, victim};
  }
  return {InsertOutcome::RejectedFull, std::nullopt};
}

std::uint64_t TxPool::executable_frontier(AccountId sender, std::uint64_t state_nonce) const {
  const auto sit = by_sender_.find(sender);
  std::uint64_t next = state_nonce;
  if (sit == by_sender_.end()) return next;
  while (sit->second.count(next) != 0) ++next;
  return next;
}

bool TxPool::is_queued(const Transaction& tx, const AccountState& state) const {
  if (tx.nonce <= state.nonce) return false;
  return tx.nonce > executable_frontier(tx.sender, state.nonce);
}

std::size_t TxPool::update_on_block(const std::unordered_set<TxHash>& included,
                                    const std::map<AccountId, AccountState>& new_state) {
  std::size_t removed = 0;
  for (const TxHash hash : included) {
    if (erase(hash)) ++removed;
  }
  for (const auto& [account, state] : new_state) {
    const auto sit = by_sender_.find(account);
    if (sit == by_sender_.end()) continue;
    std::vector<TxHash> stale;
    for (const auto& [nonce, hash] : sit->second) {
      const Transaction& tx = entries_.at(hash).tx;
      if (nonce < state.nonce || tx.max_cost() > state.balance) stale.push_back(hash);
    }
    for (const TxHash hash : stale) {
      remove_entry(hash);
      ++removed;
    }
  }
  return removed;
}

std::vector<AccountId> TxPool::senders() const {
  std::vector<AccountId> out;
  out.reserve(by_sender_.size());
  for (const auto& [sender, _] : by_sender_) out.push_back(sender);
  return out;
}

std::vector<Transaction> TxPool::sender_txs(AccountId sender) const {
  std::vector<Transaction> out;
  const auto sit = by_sender_.find(sender);
  if (sit == by_sender_.end()) return out;
  out.reserve(sit->second.size());
  for (const auto& [_, hash] : sit->second) out.push_back(entries_.at(hash).tx);
  return out;
}

std::vector<Transaction> TxPool::snapshot() const {
  std::vector<const Entry*> ordered;
  ordered.reserve(entries_.size());
  for (const auto& [_, entry] : entries_) ordered.push_back(&entry);
  std::sort(ordered.begin(), ordered.end(),
            [](const Entry* a, const Entry* b) { return a->seq < b->seq; });
  std::vector<Transaction> out;
  out.reserve(ordered.size());
  for (const Entry* e : ordered) out.push_back(e->tx);
  return out;
}

ValidationResult validate(const Transaction& tx, const AccountState& state,
                          const ValidationPolicy& policy, const TxPool& pool) {
  if (policy.check_stateless && tx.total_size > policy.max_tx_size)
    return ValidationResult::reject(RejectReason::Oversize);
  if (policy.check_balance && tx.max_cost() > state.balance)
    return ValidationResult::reject(RejectReason::InsufficientBalance);
  if (policy.check_nonce) {
    if (tx.nonce < state.nonce) return ValidationResult::reject(RejectReason::PastNonce);
    if (tx.nonce > state.nonce + policy.future_nonce_gap)
      return ValidationResult::reject(RejectReason::FutureNonceGap);
  }
  if (policy.gas_bump_percent > 0) {
    if (const Transaction* existing = pool.replacement_target(tx.sender, tx.nonce)) {
      const unsigned __int128 offered = static_cast<unsigned __int128>(tx.gas_price) * 100;
      const unsigned __int128 required = static_cast<unsigned __int128>(existing->gas_price) *
                                         (100 + policy.gas_bump_percent);
      if (offered < required) return ValidationResult::reject(RejectReason::Underpriced);
    }
  }
  return ValidationResult::accept();
}

std::vector<Transaction> forge_invalid(const ForgeStrategy& strategy, const Transaction& base,
                                       const AccountState& state_view) {
  if (strategy.count < 1) throw parameter_error("forge count must be at least 1");
  std::vector<Transaction> out;
  out.reserve(strategy.count);
  switch (strategy.kind) {
    case ForgeKind::InsufficientBalance: {
      // Fresh senders that never held funds; gas price is free to be huge.
      const Wei price = std::max<Wei>(base.gas_price, 1'000'000'000'000ULL);
      const Wei value = std::max<Wei>(base.value, 1'000'000'000'000'000'000ULL);
      for (std::size_t i = 0; i < strategy.count; ++i) {
        const AccountId fresh = splitmix64(base.sender ^ (0xfeedULL + i));
        out.push_back(make_transaction(fresh, 0, base.gas_limit, price, value,
                                       base.payload_size, base.total_size));
      }
      break;
    }
    case ForgeKind::PastNonce: {
      if (state_view.nonce < strategy.count)
        throw parameter_error("past-nonce forging needs a nonce history of at least count");
      const Wei price = std::max<Wei>(base.gas_price, 1'000'000'000'000ULL);
      for (std::size_t i = 0; i < strategy.count; ++i) {
        const std::uint64_t nonce = state_view.nonce - 1 - i;
        out.push_back(make_transaction(base.sender, nonce, base.gas_limit, price, base.value,
                                       base.payload_size, base.total_size));
      }
      break;
    }
    case ForgeKind::Duplication: {
      for (std::size_t i = 0; i < strategy.count; ++i) {
        Transaction tx = base;
        switch (strategy.vary) {
          case VaryField::GasLimit: tx.gas_limit = base.gas_limit + i; break;
          case VaryField::Nonce: tx.nonce = base.nonce + i; break;
          case VaryField::DataField: tx.payload_tag = base.payload_tag + i; break;
          case VaryField::Value: tx.value = base.value + i; break;
        }
        tx.hash = transaction_digest(tx);
        out.push_back(tx);
      }
      break;
    }
  }
  return out;
}

double validation_latency(const ValidationPolicy& policy,
                          const ValidationLatencyConstants& constants) {
  double total = 0.0;
  if (policy.check_stateless) total += constants.stateless_ms;
  if (policy.check_balance || policy.check_nonce) total += constants.stateful_ms;
  return total;
}

std::string serialize_transaction(const Transaction& tx) {
  std::ostringstream out;
  out << tx.hash << ',' << tx.sender << ',' << tx.nonce << ',' << tx.gas_limit << ','
      << tx.gas_price << ',' << tx.value << ',' << tx.payload_size << ',' << tx.total_size;
  return out.str();
}

Transaction parse_transaction(const std::vector<std::string>& fields, const std::string& path,
                              std::size_t line) {
  if (fields.size() != 8)
    throw parse_error(path, line, "expected 8 transaction fields, got " +
                                      std::to_string(fields.size()));
  Transaction tx;
  tx.hash = io::parse_uint(fields[0], path, line);
  tx.sender = io::parse_uint(fields[1], path, line);
  tx.nonce = io::parse_uint(fields[2], path, line);
  tx.gas_limit = io::parse_uint(fields[3], path, line);
  tx.gas_price = io::parse_uint(fields[4], path, line);
  tx.value = io::parse_uint(fields[5], path, line);
  tx.payload_size = io::parse_uint(fields[6], path, line);
  tx.total_size = io::parse_uint(fields[7], path, line);
  return tx;
}

}  // namespace txamp::txpool
