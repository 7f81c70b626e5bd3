/**
 * Copyright shardsim authors
 * SPDX-License-Identifier: Apache-2.0
 */

#include <gtest/gtest.h>

#include <random>

#include "shardsim/core/ledger.hpp"

using namespace shardsim;
using namespace shardsim::ledger;

namespace {
  // With two shards: alice, attacker -> shard 0; bob, carol, contract -> 1.
  const AccountId kAlice{"alice"};
  const AccountId kBob{"bob"};
  const AccountId kCarol{"carol"};
  const AccountId kContract{"contract"};

  Transaction transfer(const AccountId &from, const AccountId &to, Yocto amount,
                       Yocto gas = milli_near(10), uint64_t nonce = 0) {
    return Transaction::make(from, to, amount, gas, nonce);
  }
}  // namespace

// Golden roots computed with an independent Python encoder of the canonical
// serialization (length-prefixed names, 16-byte big-endian balances).
TEST(StateRoot, GoldenValues) {
  LedgerState empty(ShardId{0}, 1);
  EXPECT_EQ(compute_state_root(empty).hex(),
            "9fca0ade9cad1ceec1d53689c7002a78544454a1caf2015dda69565f159aaf9d");

  LedgerState one(ShardId{0}, 1);
  one.create_account(kAlice, near(10));
  EXPECT_EQ(one.state_root().hex(),
            "3625465c9c3786e5cf19c15ff13e7ff472b82f990edddbe36fa93b5fed07ae8a");

  LedgerState with_contract(ShardId{0}, 1);
  with_contract.create_account(kAlice, near(10));
  with_contract.create_account({"c"}, milli_near(500), AttackContract{near(1)});
  EXPECT_EQ(with_contract.state_root().hex(),
            "c79bf809290b41eba6daaac823ab14cb609a67277ce01acc60078b4e0ff1f99e");
}

TEST(StateRoot, EmptyRootIsShardIndependent) {
  EXPECT_EQ(compute_state_root(LedgerState(ShardId{0}, 2)),
            compute_state_root(LedgerState(ShardId{1}, 2)));
}

TEST(StateRoot, InsertionOrderIrrelevant) {
  LedgerState a(ShardId{0}, 1), b(ShardId{0}, 1);
  a.create_account(kAlice, near(1));
  a.create_account(kBob, near(2));
  b.create_account(kBob, near(2));
  b.create_account(kAlice, near(1));
  EXPECT_EQ(a.state_root(), b.state_root());
}

TEST(StateRoot, SingleBalanceChangeChangesRoot) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 200; ++i) {
    LedgerState s(ShardId{0}, 1);
    for (int k = 0; k < 5; ++k) {
      s.create_account({"acct-" + std::to_string(k)}, Yocto{rng() % 1000 + 1});
    }
    auto before = s.state_root();
    s.credit({"acct-" + std::to_string(rng() % 5)}, Yocto{1});
    EXPECT_NE(before, s.state_root());
    EXPECT_EQ(s.state_root(), compute_state_root(s));
  }
}

TEST(LedgerState, RejectsForeignAndDuplicateAccounts) {
  LedgerState s0(ShardId{0}, 2);
  s0.create_account(kAlice, near(1));
  try {
    s0.create_account(kAlice, near(1));
    FAIL();
  } catch (const LedgerError &e) {
    EXPECT_EQ(e.code(), LedgerError::Code::kAccountTaken);
  }
  try {
    s0.create_account(kBob, near(1));
    FAIL();
  } catch (const LedgerError &e) {
    EXPECT_EQ(e.code(), LedgerError::Code::kWrongShard);
  }
  EXPECT_THROW(s0.create_account({"x0"}, Yocto{}, AttackContract{Yocto{}}),
               std::invalid_argument);
}

TEST(ExecuteIntra, TransferDebitsAmountPlusGas) {
  ShardMap shards(1);
  LedgerState s(ShardId{0}, 1);
  s.create_account(kAlice, near(10));
  auto out = execute_intra_tx(s, transfer(kAlice, kBob, near(3)), shards);
  EXPECT_TRUE(out.applied());
  // 10 - 3 - 0.01 = 6.99
  EXPECT_EQ(s.balance(kAlice), Yocto::parse("6.99 NEAR"));
  EXPECT_EQ(s.balance(kBob), near(3));
  EXPECT_EQ(out.gas_burned, milli_near(10));
  EXPECT_FALSE(out.emitted_receipt);
}

TEST(ExecuteIntra, OverdraftRevertsButBurnsGas) {
  ShardMap shards(1);
  LedgerState s(ShardId{0}, 1);
  s.create_account(kAlice, near(1));
  auto out = execute_intra_tx(s, transfer(kAlice, kBob, near(3)), shards);
  EXPECT_EQ(out.status, OutcomeStatus::kReverted);
  EXPECT_EQ(out.revert_reason, "insufficient");
  EXPECT_EQ(s.balance(kAlice), near(1) - milli_near(10));
  EXPECT_EQ(s.balance(kBob), Yocto{});
  ASSERT_EQ(out.state_delta.size(), 1u);
  EXPECT_EQ(out.state_delta[0].account, kAlice);
}

TEST(ExecuteIntra, ZeroAmountOnlyBurnsGas) {
  ShardMap shards(1);
  LedgerState s(ShardId{0}, 1);
  s.create_account(kAlice, near(1));
  auto out = execute_intra_tx(s, transfer(kAlice, kBob, Yocto{}), shards);
  EXPECT_TRUE(out.applied());
  EXPECT_EQ(s.balance(kAlice), near(1) - milli_near(10));
}

TEST(ExecuteIntra, UnknownSenderAndWrongPath) {
  ShardMap shards(2);
  LedgerState s0(ShardId{0}, 2);
  try {
    execute_intra_tx(s0, transfer({"attacker"}, kAlice, near(1)), shards);
    FAIL();
  } catch (const LedgerError &e) {
    EXPECT_EQ(e.code(), LedgerError::Code::kUnknownAccount);
  }
  s0.create_account(kAlice, near(5));
  EXPECT_THROW(execute_intra_tx(s0, transfer(kAlice, kBob, near(1)), shards),
               LedgerError);
}

TEST(ExecutePhase1, EmitsReceiptForReceiverShard) {
  ShardMap shards(2);
  LedgerState s0(ShardId{0}, 2);
  s0.create_account(kAlice, near(5));
  auto tx = Transaction::make(kAlice, kContract, near(1), milli_near(10), 1,
                              TxKind::kContractCall, "send");
  auto out = execute_cstx_phase1(s0, tx, shards);
  ASSERT_TRUE(out.applied());
  ASSERT_TRUE(out.emitted_receipt);
  const auto &r = *out.emitted_receipt;
  EXPECT_EQ(r.target_shard, ShardId{1});
  EXPECT_EQ(r.origin_tx, tx.id);
  EXPECT_EQ(receipt_value(r), near(1));
  EXPECT_EQ(r.former_result.debited, near(1) + milli_near(10));
  EXPECT_EQ(r.id, receipt_id(r));
  EXPECT_EQ(s0.balance(kAlice), near(4) - milli_near(10));
}

TEST(ExecutePhase1, InsufficientFundsEmitsNothing) {
  ShardMap shards(2);
  LedgerState s0(ShardId{0}, 2);
  s0.create_account(kAlice, milli_near(500));
  auto out = execute_cstx_phase1(s0, transfer(kAlice, kBob, near(1)), shards);
  EXPECT_EQ(out.status, OutcomeStatus::kReverted);
  EXPECT_FALSE(out.emitted_receipt);
}

TEST(ExecutePhase1, IntraTransactionRejected) {
  ShardMap shards(2);
  LedgerState s1(ShardId{1}, 2);
  s1.create_account(kBob, near(5));
  try {
    execute_cstx_phase1(s1, transfer(kBob, kCarol, near(1)), shards);
    FAIL();
  } catch (const LedgerError &e) {
    EXPECT_EQ(e.code(), LedgerError::Code::kNotCrossShard);
  }
}

// Property: every emitted receipt targets the receiver's shard.
TEST(ExecutePhase1, ReceiptTargetMatchesReceiverShardProperty) {
  std::mt19937_64 rng(99);
  for (uint32_t s : {2u, 3u, 4u, 7u}) {
    ShardMap shards(s);
    for (int i = 0; i < 300; ++i) {
      AccountId sender{"sender-" + std::to_string(rng() % 50)};
      AccountId receiver{"recv-" + std::to_string(rng() % 50)};
      if (shards.of(sender) == shards.of(receiver)) continue;
      LedgerState st(shards.of(sender), s);
      st.create_account(sender, Yocto{rng() % 2000} * 1'000'000'000'000ULL);
      auto tx = transfer(sender, receiver,
                         Yocto{rng() % 1500} * 1'000'000'000'000ULL,
                         Yocto{1'000'000'000ULL}, i);
      auto out = execute_cstx_phase1(st, tx, shards);
      EXPECT_EQ(out.applied(), out.emitted_receipt.has_value());
      if (out.emitted_receipt) {
        EXPECT_EQ(out.emitted_receipt->target_shard, shards.of(receiver));
      }
    }
  }
}

TEST(ExecuteReceipt, PlainCreditApplied) {
  LedgerState s1(ShardId{1}, 2);
  Receipt r;
  r.target_shard = ShardId{1};
  r.payload = CreditPayload{kBob, near(1)};
  auto out = execute_receipt(s1, r);
  EXPECT_TRUE(out.applied());
  EXPECT_EQ(s1.balance(kBob), near(1));
}

TEST(ExecuteReceipt, AttackContractRevertsOverThreshold) {
  LedgerState s1(ShardId{1}, 2);
  s1.create_account(kContract, milli_near(500), AttackContract{near(1)});
  Receipt r;
  r.target_shard = ShardId{1};
  r.payload = CallPayload{kContract, "send", near(1)};
  auto out = execute_receipt(s1, r);
  EXPECT_EQ(out.status, OutcomeStatus::kReverted);
  EXPECT_EQ(out.revert_reason, "Over");
  EXPECT_TRUE(out.state_delta.empty());
  EXPECT_EQ(s1.balance(kContract), milli_near(500));
}

TEST(ExecuteReceipt, AttackContractAcceptsBelowThreshold) {
  LedgerState s1(ShardId{1}, 2);
  s1.create_account(kContract, Yocto{}, AttackContract{near(1)});
  Receipt r;
  r.target_shard = ShardId{1};
  r.payload = CallPayload{kContract, "send", milli_near(500)};
  auto out = execute_receipt(s1, r);
  EXPECT_TRUE(out.applied());
  EXPECT_EQ(s1.balance(kContract), milli_near(500));
}

TEST(ExecuteReceipt, LiteralPolarityInvertsTheGuard) {
  ExecutionConfig literal{AssertPolarity::kLiteral};
  LedgerState s1(ShardId{1}, 2);
  s1.create_account(kContract, milli_near(500), AttackContract{near(1)});
  Receipt r;
  r.target_shard = ShardId{1};
  r.payload = CallPayload{kContract, "send", near(1)};
  EXPECT_TRUE(execute_receipt(s1, r, literal).applied());

  LedgerState fresh(ShardId{1}, 2);
  fresh.create_account(kContract, Yocto{}, AttackContract{near(1)});
  r.payload = CallPayload{kContract, "send", milli_near(500)};
  EXPECT_EQ(execute_receipt(fresh, r, literal).revert_reason, "Over");
}

TEST(ExecuteReceipt, WrongShardIsUnknownTarget) {
  LedgerState s0(ShardId{0}, 2);
  Receipt r;
  r.target_shard = ShardId{1};
  r.payload = CreditPayload{kBob, near(1)};
  try {
    execute_receipt(s0, r);
    FAIL();
  } catch (const LedgerError &e) {
    EXPECT_EQ(e.code(), LedgerError::Code::kUnknownReceiptTarget);
  }
}

TEST(AttackGuard, BoundaryAtThreshold) {
  // Exactly at the threshold is not "more than".
  EXPECT_FALSE(attack_contract_rejects(Yocto{}, near(1), near(1),
                                       AssertPolarity::kProse));
  EXPECT_TRUE(attack_contract_rejects(Yocto{1}, near(1), near(1),
                                      AssertPolarity::kProse));
  EXPECT_TRUE(attack_contract_rejects(Yocto{}, near(1), near(1),
                                      AssertPolarity::kLiteral));
}

// Conservation and revert purity over random two-phase batches: balances +
// burned gas + receipts in flight stay constant, and a reverted outcome only
// ever touches the payer.
TEST(Execution, ConservationAndRevertPurityProperty) {
  constexpr uint32_t kShards = 3;
  ShardMap shards(kShards);
  std::vector<LedgerState> states;
  for (uint32_t i = 0; i < kShards; ++i) states.emplace_back(ShardId{i}, kShards);
  std::vector<AccountId> accounts;
  for (int i = 0; i < 30; ++i) {
    AccountId a{"acct-" + std::to_string(i)};
    accounts.push_back(a);
    states[shards.of(a).value].create_account(a, near(5));
  }
  Yocto supply;
  for (auto &s : states) supply += s.total_balance();

  std::mt19937_64 rng(2024);
  Yocto burned;
  std::vector<Receipt> in_flight;
  for (int step = 0; step < 3000; ++step) {
    if (!in_flight.empty() && rng() % 3 == 0) {
      auto r = in_flight.back();
      in_flight.pop_back();
      execute_receipt(states[r.target_shard.value], r);
    } else {
      const auto &from = accounts[rng() % accounts.size()];
      const auto &to = accounts[rng() % accounts.size()];
      auto tx = transfer(from, to, milli_near(rng() % 3000), milli_near(1), step);
      auto &st = states[shards.of(from).value];
      auto out = execute_transaction(st, tx, shards);
      burned += out.gas_burned;
      if (!out.applied()) {
        for (const auto &d : out.state_delta) EXPECT_EQ(d.account, from);
      }
      if (out.emitted_receipt) in_flight.push_back(*out.emitted_receipt);
    }
    Yocto total = burned;
    for (auto &s : states) total += s.total_balance();
    for (auto &r : in_flight) total += receipt_value(r);
    ASSERT_EQ(total, supply) << "drift at step " << step;
  }
}
