#include <doctest.h>

#include <random>
#include <set>
#include <unordered_map>

#include "txamp/io.hpp"
#include "txamp/txpool.hpp"

using namespace txamp;
using namespace txamp::txpool;

namespace {

constexpr Wei kEth = 1'000'000'000'000'000'000ULL;
constexpr Wei kGwei = 1'000'000'000ULL;

Transaction simple_tx(AccountId sender, std::uint64_t nonce, Wei gas_price, Wei value = 0) {
  return make_transaction(sender, nonce, 21000, gas_price, value, 100);
}

}  // namespace

TEST_CASE("transaction digest changes with every field") {
  const Transaction base = make_transaction(7, 3, 21000, 50, 1000, 64);
  Transaction t = base;
  t.value += 1;
  CHECK(transaction_digest(t) != base.hash);
  t = base;
  t.payload_tag += 1;
  CHECK(transaction_digest(t) != base.hash);
  t = base;
  t.nonce += 1;
  CHECK(transaction_digest(t) != base.hash);
  CHECK(transaction_digest(base) == base.hash);
  CHECK(base.total_size == kBaseEncodedSize + 64);
}

TEST_CASE("validation ordering and outcomes") {
  const ValidationPolicy regular = ValidationPolicy::regular();
  TxPool pool(16, regular.gas_bump_percent);

  SUBCASE("value above balance is an insufficient-balance rejection") {
    const Transaction tx = simple_tx(1, 0, 10 * kGwei, kEth);
    const auto res = validate(tx, {0, 0}, regular, pool);
    CHECK_FALSE(res.accepted);
    CHECK(res.reason == RejectReason::InsufficientBalance);
  }
  SUBCASE("past nonce") {
    const Transaction tx = simple_tx(1, 5, 10 * kGwei);
    const auto res = validate(tx, {kEth, 10}, regular, pool);
    CHECK_FALSE(res.accepted);
    CHECK(res.reason == RejectReason::PastNonce);
  }
  SUBCASE("future nonce beyond the gap") {
    const Transaction tx = simple_tx(1, 65, 10 * kGwei);
    const auto res = validate(tx, {kEth, 0}, regular, pool);
    CHECK_FALSE(res.accepted);
    CHECK(res.reason == RejectReason::FutureNonceGap);
    CHECK(validate(simple_tx(1, 64, 10 * kGwei), {kEth, 0}, regular, pool).accepted);
  }
  SUBCASE("oversize") {
    Transaction tx = make_transaction(1, 0, 21000, 10 * kGwei, 0, 200000);
    const auto res = validate(tx, {kEth, 0}, regular, pool);
    CHECK_FALSE(res.accepted);
    CHECK(res.reason == RejectReason::Oversize);
  }
  SUBCASE("first failing check names the rejection") {
    // Oversize beats insufficient balance beats past nonce.
    Transaction tx = make_transaction(1, 2, 21000, 10 * kGwei, kEth, 200000);
    CHECK(validate(tx, {0, 5}, regular, pool).reason == RejectReason::Oversize);
    tx = simple_tx(1, 2, 10 * kGwei, kEth);
    CHECK(validate(tx, {0, 5}, regular, pool).reason == RejectReason::InsufficientBalance);
  }
  SUBCASE("gas bump rule on replacement") {
    const Transaction original = simple_tx(1, 0, 100000);
    pool.insert(original, {kEth, 0});
    const Transaction plus5 = simple_tx(1, 0, 105000);
    const Transaction plus10 = simple_tx(1, 0, 110000);
    const Transaction plus11 = simple_tx(1, 0, 111000);
    CHECK(validate(plus5, {kEth, 0}, regular, pool).reason == RejectReason::Underpriced);
    CHECK(validate(plus10, {kEth, 0}, regular, pool).accepted);  // exactly +10%
    CHECK(validate(plus11, {kEth, 0}, regular, pool).accepted);
  }
  SUBCASE("modified policy accepts what regular rejects") {
    const ValidationPolicy modified = ValidationPolicy::modified();
    CHECK(validate(simple_tx(1, 0, 10 * kGwei, kEth), {0, 0}, modified, pool).accepted);
    CHECK(validate(simple_tx(1, 5, 10 * kGwei), {kEth, 10}, modified, pool).accepted);
  }
}

TEST_CASE("pool insertion and eviction") {
  const AccountState rich{100 * kEth, 0};

  SUBCASE("inserts below capacity") {
    TxPool pool(4, 10);
    const auto res = pool.insert(simple_tx(1, 0, 10), rich);
    CHECK(res.outcome == InsertOutcome::Inserted);
    CHECK(pool.size() == 1);
  }
  SUBCASE("replacement keeps one entry per sender and nonce") {
    TxPool pool(4, 10);
    const Transaction original = simple_tx(1, 0, 100);
    pool.insert(original, rich);
    const auto res = pool.insert(simple_tx(1, 0, 120), rich);
    CHECK(res.outcome == InsertOutcome::Replaced);
    REQUIRE(res.displaced.has_value());
    CHECK(res.displaced->hash == original.hash);
    CHECK(pool.size() == 1);
  }
  SUBCASE("full pool evicts the cheapest entry, checked by brute force") {
    TxPool pool(64, 10);
    std::vector<Transaction> shadow;
    std::mt19937_64 rng(11);
    for (std::uint64_t i = 0; i < 64; ++i) {
      const Wei price = 10 + rng() % 100;
      const Transaction tx = simple_tx(100 + i, 0, price);
      pool.insert(tx, rich);
      shadow.push_back(tx);
    }
    const Transaction incoming = simple_tx(999, 0, 500);
    const auto res = pool.insert(incoming, rich);
    CHECK(res.outcome == InsertOutcome::EvictedOther);
    const auto cheapest =
        std::min_element(shadow.begin(), shadow.end(), [](const auto& a, const auto& b) {
          return a.gas_price < b.gas_price;
        });
    CHECK(res.displaced->hash == cheapest->hash);
    CHECK(pool.size() == 64);
  }
  SUBCASE("cheaper arrival bounces off a full pool") {
    TxPool pool(2, 10);
    pool.insert(simple_tx(1, 0, 10), rich);
    pool.insert(simple_tx(2, 0, 10), rich);
    const auto res = pool.insert(simple_tx(3, 0, 5), rich);
    CHECK(res.outcome == InsertOutcome::RejectedFull);
    // equal price does not evict either
    CHECK(pool.insert(simple_tx(4, 0, 10), rich).outcome == InsertOutcome::RejectedFull);
  }
  SUBCASE("eviction ties break toward the oldest entry") {
    TxPool pool(2, 10);
    const Transaction older = simple_tx(1, 0, 10);
    const Transaction newer = simple_tx(2, 0, 10);
    pool.insert(older, rich);
    pool.insert(newer, rich);
    const auto res = pool.insert(simple_tx(3, 0, 11), rich);
    CHECK(res.outcome == InsertOutcome::EvictedOther);
    CHECK(res.displaced->hash == older.hash);
  }
  SUBCASE("future transactions are pushed back when the pool is full") {
    TxPool pool(2, 10);
    pool.insert(simple_tx(1, 0, 10), rich);
    pool.insert(simple_tx(2, 0, 10), rich);
    // nonce 5 against state nonce 0 has a gap: no eviction even at a
    // higher price
    const auto res = pool.insert(simple_tx(3, 5, 1000), {100 * kEth, 0});
    CHECK(res.outcome == InsertOutcome::RejectedFull);
    CHECK(pool.size() == 2);
  }
}

TEST_CASE("queued classification follows the contiguous frontier") {
  TxPool pool(16, 10);
  const AccountState state{100 * kEth, 3};
  pool.insert(simple_tx(1, 3, 10), state);
  pool.insert(simple_tx(1, 4, 10), state);
  CHECK(pool.executable_frontier(1, 3) == 5);
  CHECK_FALSE(pool.is_queued(simple_tx(1, 5, 10), state));   // extends the run
  CHECK(pool.is_queued(simple_tx(1, 6, 10), state));         // gap at 5... 6 parks
  CHECK_FALSE(pool.is_queued(simple_tx(1, 2, 10), state));   // past nonces never queue
}

TEST_CASE("forged transaction classes") {
  const ValidationPolicy regular = ValidationPolicy::regular();
  const ValidationPolicy modified = ValidationPolicy::modified();
  TxPool scratch(16, regular.gas_bump_percent);
  const Transaction base = simple_tx(42, 0, 30 * kGwei);

  SUBCASE("insufficient balance senders are fresh and unfunded") {
    const auto txs = forge_invalid({ForgeKind::InsufficientBalance, 3, {}}, base, {});
    REQUIRE(txs.size() == 3);
    std::set<AccountId> senders;
    for (const auto& tx : txs) {
      senders.insert(tx.sender);
      const auto res = validate(tx, {0, 0}, regular, scratch);
      CHECK_FALSE(res.accepted);
      CHECK(res.reason == RejectReason::InsufficientBalance);
      CHECK(validate(tx, {0, 0}, modified, scratch).accepted);
    }
    CHECK(senders.size() == 3);
  }
  SUBCASE("past nonces walk down from the account nonce") {
    const AccountState state{kEth, 10};
    const auto txs = forge_invalid({ForgeKind::PastNonce, 5, {}}, base, state);
    REQUIRE(txs.size() == 5);
    std::set<std::uint64_t> nonces;
    for (const auto& tx : txs) {
      nonces.insert(tx.nonce);
      const auto res = validate(tx, state, regular, scratch);
      CHECK_FALSE(res.accepted);
      CHECK(res.reason == RejectReason::PastNonce);
      CHECK(validate(tx, state, modified, scratch).accepted);
    }
    CHECK(nonces == std::set<std::uint64_t>{5, 6, 7, 8, 9});
  }
  SUBCASE("past nonce needs history") {
    CHECK_THROWS_AS(forge_invalid({ForgeKind::PastNonce, 5, {}}, base, {kEth, 3}),
                    parameter_error);
  }
  SUBCASE("duplicates share sender, nonce and price but not hash") {
    const auto txs =
        forge_invalid({ForgeKind::Duplication, 2, VaryField::DataField}, base, {kEth, 0});
    REQUIRE(txs.size() == 2);
    CHECK(txs[0].hash != txs[1].hash);
    CHECK(txs[0].sender == txs[1].sender);
    CHECK(txs[0].nonce == txs[1].nonce);
    CHECK(txs[0].gas_price == txs[1].gas_price);

    // Both co-resident within one insertion round iff the bump rule is off.
    TxPool no_bump(16, 0);
    const AccountState state{kEth, 0};
    for (const auto& tx : txs) {
      CHECK(validate(tx, state, modified, no_bump).accepted);
      no_bump.insert(tx, state);
    }
    CHECK(no_bump.size() == 2);

    TxPool bumped(16, 10);
    CHECK(validate(txs[0], state, regular, bumped).accepted);
    bumped.insert(txs[0], state);
    CHECK(validate(txs[1], state, regular, bumped).reason == RejectReason::Underpriced);
  }
  SUBCASE("vary fields differ in exactly one dimension") {
    const auto gas = forge_invalid({ForgeKind::Duplication, 3, VaryField::GasLimit}, base, {});
    CHECK(gas[2].gas_limit == base.gas_limit + 2);
    const auto val = forge_invalid({ForgeKind::Duplication, 3, VaryField::Value}, base, {});
    CHECK(val[2].value == base.value + 2);
    CHECK(val[2].gas_limit == base.gas_limit);
    const auto non = forge_invalid({ForgeKind::Duplication, 3, VaryField::Nonce}, base, {});
    CHECK(non[2].nonce == base.nonce + 2);
  }
  SUBCASE("count must be positive") {
    CHECK_THROWS_AS(forge_invalid({ForgeKind::Duplication, 0, {}}, base, {}), parameter_error);
  }
}

TEST_CASE("update on block") {
  const AccountState rich{100 * kEth, 0};
  TxPool pool(16, 10);
  const Transaction a = simple_tx(1, 0, 10);
  const Transaction b = simple_tx(1, 1, 10);
  const Transaction c = simple_tx(2, 0, 10);
  pool.insert(a, rich);
  pool.insert(b, rich);
  pool.insert(c, rich);

  SUBCASE("included transactions leave the pool") {
    const std::size_t removed = pool.update_on_block({a.hash}, {{1, {100 * kEth, 1}}});
    CHECK(removed == 1);
    CHECK_FALSE(pool.contains(a.hash));
    CHECK(pool.contains(b.hash));
  }
  SUBCASE("state advance flushes stale nonces") {
    const std::size_t removed = pool.update_on_block({}, {{1, {100 * kEth, 2}}});
    CHECK(removed == 2);  // nonces 0 and 1 are now past
    CHECK(pool.contains(c.hash));
  }
  SUBCASE("balance collapse flushes unaffordable entries") {
    const std::size_t removed = pool.update_on_block({}, {{2, {0, 0}}});
    CHECK(removed == 1);
    CHECK_FALSE(pool.contains(c.hash));
  }
  SUBCASE("empty update is the identity") {
    CHECK(pool.update_on_block({}, {}) == 0);
    CHECK(pool.size() == 3);
  }
  SUBCASE("a queued entry becomes executable when the gap closes") {
    const Transaction future = simple_tx(2, 2, 10);
    pool.insert(future, {100 * kEth, 0});
    CHECK(pool.is_queued(future, AccountState{100 * kEth, 0}));
    pool.update_on_block({c.hash}, {{2, {100 * kEth, 2}}});
    CHECK_FALSE(pool.is_queued(future, AccountState{100 * kEth, 2}));
  }
}

TEST_CASE("validation latency constants") {
  ValidationPolicy p = ValidationPolicy::regular();
  CHECK(validation_latency(p) == doctest::Approx(0.97));
  p.check_balance = false;
  CHECK(validation_latency(p) == doctest::Approx(0.97));  // nonce still needs the state
  p.check_nonce = false;
  CHECK(validation_latency(p) == doctest::Approx(0.08));
  p.check_stateless = false;
  CHECK(validation_latency(p) == doctest::Approx(0.0));
  ValidationPolicy balance_only = ValidationPolicy::regular();
  balance_only.check_stateless = false;
  CHECK(validation_latency(balance_only) == doctest::Approx(0.89));
}

TEST_CASE("transaction serialization round trip") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 50; ++i) {
    const Transaction tx = make_transaction(rng(), rng() % 100, 21000 + rng() % 1000,
                                            rng() % 1000000, rng() % 1000000, rng() % 4096);
    const std::string line = serialize_transaction(tx);
    const Transaction back = parse_transaction(io::split_csv(line), "mem", 1);
    CHECK(back.hash == tx.hash);
    CHECK(back.sender == tx.sender);
    CHECK(back.nonce == tx.nonce);
    CHECK(back.gas_limit == tx.gas_limit);
    CHECK(back.gas_price == tx.gas_price);
    CHECK(back.value == tx.value);
    CHECK(back.payload_size == tx.payload_size);
    CHECK(back.total_size == tx.total_size);
  }
  CHECK_THROWS_AS(parse_transaction({"1", "2"}, "mem", 1), parse_error);
}

TEST_CASE("randomized operation sequences hold the pool invariants") {
  const ValidationPolicy regular = ValidationPolicy::regular();
  const ValidationPolicy modified = ValidationPolicy::modified();
  TxPool regular_pool(128, regular.gas_bump_percent);
  TxPool modified_pool(128, modified.gas_bump_percent);
  std::unordered_map<AccountId, AccountState> accounts;
  std::mt19937_64 rng(20240901);

  auto state_of = [&](AccountId id) -> AccountState& {
    auto [it, inserted] = accounts.try_emplace(id);
    if (inserted && id % 3 != 0) it->second = {100 * kEth, rng() % 8};
    return it->second;
  };

  for (int step = 0; step < 10000; ++step) {
    const AccountId sender = 1 + rng() % 40;
    AccountState& state = state_of(sender);
    const std::uint64_t nonce = state.nonce + rng() % 80;  // may breach the gap
    const Wei price = 1 + rng() % 1000;
    const Wei value = (rng() % 4 == 0) ? 200 * kEth : 0;  // sometimes unaffordable
    const Transaction tx = simple_tx(sender, nonce, price, value);

    if (validate(tx, state, regular, regular_pool).accepted)
      regular_pool.insert(tx, state);
    if (validate(tx, state, modified, modified_pool).accepted)
      modified_pool.insert(tx, state);

    if (step % 97 == 0) {
      AccountState& bump = state_of(1 + rng() % 40);
      bump.nonce += 1;
      std::map<AccountId, AccountState> delta;
      for (const auto& [id, st] : accounts) delta.emplace(id, st);
      regular_pool.update_on_block({}, delta);
      modified_pool.update_on_block({}, delta);
    }

    CHECK(regular_pool.size() <= regular_pool.capacity());
    CHECK(modified_pool.size() <= modified_pool.capacity());
  }

  // Nothing in the regular pool may fail a fresh full validation against the
  // current state (scratch pool sidesteps the replacement rule).
  TxPool scratch(1, 10);
  for (const auto& tx : regular_pool.snapshot()) {
    const auto res = validate(tx, accounts.at(tx.sender), regular, scratch);
    CHECK(res.accepted);
  }
}
