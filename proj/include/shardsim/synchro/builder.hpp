/**
 * Copyright shardsim authors
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "shardsim/nightshade/chunk.hpp"

namespace shardsim::synchro {

  using ledger::TxPtr;
  using nightshade::Block;
  using nightshade::Chunk;

  /// A coordinator's proposal: every chunk carries `block.block_hash`.
  struct CandidateBlock {
    RoleId coordinator;
    Block block;
    Digest signature;  // coordinator's signature over block.block_hash

    Height height() const {
      return block.height;
    }
    const Digest &hash() const {
      return block.block_hash;
    }
  };

  /// Every cross-shard transaction in the block has exactly one receipt in its
  /// receiver's chunk, and every receipt's origin transaction is in the block.
  bool check_atomicity(const Block &block, const ledger::ShardMap &shards);

  /// Visits pending transactions of one shard in arrival order; the visitor
  /// returns false to stop.
  using TxVisitor = std::function<bool(const TxPtr &)>;
  using TxSource = std::function<void(ShardId, const TxVisitor &)>;

  TxSource source_from(std::span<const TxPtr> txs, const ledger::ShardMap &shards);

  struct BuildConfig {
    size_t max_txs_per_chunk = 100;
    ledger::ExecutionConfig exec;
    /// Faulty coordinators.
    std::optional<AccountId> ignore_user;
    bool cstx_only = false;
  };

  struct BuildResult {
    CandidateBlock candidate;
    /// Post-state of every shard after the candidate.
    std::vector<ledger::LedgerState> post_states;
    std::vector<TxPtr> included;
    /// Fail on the parent state alone (including the receipt side of
    /// cross-shard calls); never includable on this branch.
    std::vector<TxPtr> excluded;
    /// Conflict with earlier transactions of the same candidate; retried at
    /// the next height.
    std::vector<TxPtr> deferred;
  };

  /// Builds an atomic candidate on top of `parent_states`. Transactions are
  /// taken per sender shard in arrival order. A cross-shard transaction's
  /// receipt is executed speculatively and placed in the receiver's chunk of
  /// the same candidate. Every included entry applies; the result is
  /// re-verified chunk by chunk before signing.
  BuildResult coordinator_build_block(const RoleId &coordinator, const TxSource &source,
                                      Height height, const Digest &parent_hash,
                                      std::span<const ledger::LedgerState> parent_states,
                                      const ledger::ShardMap &shards,
                                      const BuildConfig &config);

}  // namespace shardsim::synchro
