/**
 * Copyright shardsim authors
 * SPDX-License-Identifier: Apache-2.0
 */

#include <gtest/gtest.h>

#include "../support/fixtures.hpp"
#include "shardsim/synchro/producer.hpp"
#include "shardsim/synchro/validator.hpp"

using namespace shardsim;
using namespace shardsim::synchro;
using fixtures::make_genesis;
using fixtures::transfer;

namespace {
  const ledger::ShardMap kShards(2);

  struct Fixture {
    std::vector<ledger::LedgerState> genesis =
        make_genesis(2, {{"alice", near(10)}, {"bob", near(10)}});
    Block parent = nightshade::genesis_block(2, genesis);
    std::vector<Digest> roots{genesis[0].state_root(), genesis[1].state_root()};
    ProofSystem proofs;
    TrustLedger trust;

    BuildResult build(std::vector<TxPtr> txs, BuildConfig cfg = {}) {
      return coordinator_build_block(RoleId::coordinator(0), source_from(txs, kShards), 1,
                                     parent.block_hash, genesis, kShards, cfg);
    }

    Submission prove(const Block &b, uint32_t shard, uint32_t producer, bool corrupt = false) {
      auto chunk = b.chunks[shard];
      auto v = producer_verify_chunk(chunk, ShardId{shard}, genesis[shard], kShards, {});
      EXPECT_TRUE(v.accepted) << v.reason;
      auto proof = producer_make_proof(chunk, v, RoleId::producer(ShardId{shard}, producer),
                                       {}, proofs);
      if (corrupt) chunk = corrupt_chunk(chunk);
      return {chunk, proof};
    }

    GvOutcome run(const std::vector<Submission> &subs) {
      GvRequest rq;
      rq.height = 1;
      rq.parent_hash = parent.block_hash;
      rq.parent_roots = roots;
      rq.submissions = subs;
      rq.shards = &kShards;
      rq.proofs = &proofs;
      rq.trust = &trust;
      rq.t_zk_v = VirtualTime{4300};
      return gv_reconstruct_and_finalize(rq);
    }
  };

  std::vector<TxPtr> workload() {
    return {transfer("alice", "bob", near(1), 1), transfer("bob", "alice", near(1), 1)};
  }
}  // namespace

TEST(GlobalValidator, FinalizesHonestGroup) {
  Fixture f;
  auto b = f.build(workload()).candidate.block;
  auto out = f.run({f.prove(b, 0, 0), f.prove(b, 1, 0)});
  ASSERT_TRUE(out.block);
  EXPECT_EQ(out.block->block_hash, b.block_hash);
  EXPECT_EQ(out.proofs_checked, 2u);
  EXPECT_EQ(out.verify_cost, VirtualTime{8600});
  EXPECT_EQ(out.producers.size(), 2u);
  EXPECT_FALSE(out.error);
}

TEST(GlobalValidator, FallsBackPastMalformedProducer) {
  Fixture f;
  auto b = f.build(workload()).candidate.block;
  auto out = f.run({f.prove(b, 0, 0, true), f.prove(b, 0, 1), f.prove(b, 1, 0)});
  ASSERT_TRUE(out.block);
  EXPECT_EQ(out.producers[0], RoleId::producer(ShardId{0}, 1));
  EXPECT_EQ(out.proofs_checked, 3u);
  // Once the honest producer is trusted more, it is tried first.
  f.trust.credit_block(std::vector<RoleId>{RoleId::producer(ShardId{0}, 1)});
  EXPECT_EQ(f.run({f.prove(b, 0, 0, true), f.prove(b, 0, 1), f.prove(b, 1, 0)})
                .proofs_checked,
            2u);
}

TEST(GlobalValidator, ErrorKinds) {
  Fixture f;
  auto b = f.build(workload()).candidate.block;
  auto only0 = f.run({f.prove(b, 0, 0)});
  EXPECT_FALSE(only0.block);
  EXPECT_EQ(only0.error, GvError::kIncompleteGroup);

  auto bad = f.run({f.prove(b, 0, 0, true), f.prove(b, 1, 0)});
  EXPECT_EQ(bad.error, GvError::kProofInvalid);

  BuildConfig cstx;
  cstx.cstx_only = true;
  auto broken = f.build(workload(), cstx).candidate.block;
  auto nonatomic = f.run({f.prove(broken, 0, 0), f.prove(broken, 1, 0)});
  EXPECT_EQ(nonatomic.error, GvError::kAtomicityViolation);

  auto wrong_parent = f;
  wrong_parent.parent.block_hash.bytes[0] ^= 1;
  auto orphan = wrong_parent.build(workload()).candidate.block;
  EXPECT_EQ(f.run({f.prove(orphan, 0, 0), f.prove(orphan, 1, 0)}).error,
            GvError::kParentMismatch);
  EXPECT_EQ(f.run({}).error, GvError::kIncompleteGroup);
}

TEST(GlobalValidator, PrefersFullerGroupAndSkipsBrokenOne) {
  Fixture f;
  auto full = f.build(workload()).candidate.block;
  BuildConfig censor;
  censor.ignore_user = AccountId{"alice"};
  auto thin = f.build(workload(), censor).candidate.block;
  ASSERT_NE(full.block_hash, thin.block_hash);
  auto out = f.run({f.prove(thin, 0, 0), f.prove(thin, 1, 0), f.prove(full, 0, 1),
                    f.prove(full, 1, 1)});
  ASSERT_TRUE(out.block);
  EXPECT_EQ(out.block->block_hash, full.block_hash);

  BuildConfig cstx;
  cstx.cstx_only = true;
  auto broken = f.build(workload(), cstx).candidate.block;
  auto fallback = f.run({f.prove(broken, 0, 0), f.prove(broken, 1, 0), f.prove(thin, 0, 1),
                         f.prove(thin, 1, 1)});
  ASSERT_TRUE(fallback.block);
  EXPECT_EQ(fallback.block->block_hash, thin.block_hash);
  ASSERT_EQ(fallback.rejected.size(), 1u);
  EXPECT_EQ(fallback.rejected[0].second, GvError::kAtomicityViolation);
}

TEST(ForkChoice, HeaviestThenLowestTip) {
  Digest a, b;
  a.bytes[0] = 1;
  b.bytes[0] = 2;
  std::vector<std::vector<ForkBlock>> forks{{{b, 3}, {b, 3}}, {{a, 1}, {a, 1}}};
  EXPECT_EQ(fork_choice(forks), 0u);
  forks[1] = {{a, 3}, {a, 3}};
  EXPECT_EQ(fork_choice(forks), 1u);
  EXPECT_THROW(fork_choice(std::span<const std::vector<ForkBlock>>{}), std::invalid_argument);
}

TEST(BlockTree, SignaturesAccumulateAndBestTipFollowsWeight) {
  Fixture f;
  BlockTree tree(f.parent);
  auto honest = f.build(workload()).candidate.block;
  BuildConfig cstx;
  cstx.cstx_only = true;
  auto bad = f.build(workload(), cstx).candidate.block;
  for (uint32_t i = 0; i < 3; ++i) tree.add(honest, RoleId::global_validator(i), kShards);
  tree.add(bad, RoleId::global_validator(3), kShards);
  tree.add(honest, RoleId::global_validator(0), kShards);
  EXPECT_EQ(tree.find(honest.block_hash)->signers.size(), 3u);
  EXPECT_TRUE(tree.find(honest.block_hash)->atomic);
  EXPECT_FALSE(tree.find(bad.block_hash)->atomic);
  EXPECT_EQ(tree.best_tip(), honest.block_hash);
  EXPECT_EQ(tree.leaves().size(), 2u);
  EXPECT_EQ(tree.chain_to(honest.block_hash).size(), 2u);
  Block orphan = honest;
  orphan.parent.bytes[3] ^= 1;
  orphan.block_hash.bytes[3] ^= 1;
  EXPECT_THROW(tree.add(orphan, RoleId::global_validator(0), kShards), std::invalid_argument);
}

TEST(Incentives, TrustOrderAndRewards) {
  TrustLedger trust;
  std::vector<RoleId> cs{RoleId::coordinator(0), RoleId::coordinator(1),
                         RoleId::coordinator(2)};
  EXPECT_EQ(producer_pick_coordinator(trust, cs, 0), cs[0]);
  EXPECT_EQ(producer_pick_coordinator(trust, cs, 1), cs[1]);
  EXPECT_EQ(producer_pick_coordinator(trust, cs, 5), cs[2]);
  std::vector<RoleId> twice{cs[2], cs[2]};
  trust.credit_block(twice);
  EXPECT_EQ(trust.score(cs[2]), 1u);
  EXPECT_EQ(producer_pick_coordinator(trust, cs, 0), cs[2]);
  EXPECT_THROW(producer_pick_coordinator(trust, {}, 0), std::invalid_argument);

  RewardLedger rewards(3);
  rewards.reward_block(twice);
  rewards.reward_block(cs);
  EXPECT_EQ(rewards.reward(cs[2]), 6u);
  EXPECT_EQ(rewards.reward(cs[0]), 3u);
  EXPECT_EQ(rewards.reward(RoleId::global_validator(0)), 0u);
}
