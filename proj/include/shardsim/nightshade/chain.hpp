/**
 * Copyright shardsim authors
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

#include <deque>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "shardsim/nightshade/chunk.hpp"
#include "shardsim/nightshade/mempool.hpp"

namespace shardsim::nightshade {

  struct ChunkRecord {
    std::vector<ledger::OutcomeStatus> receipt_status;
    std::vector<ledger::OutcomeStatus> tx_status;
  };

  /// Execution bookkeeping kept next to each block.
  struct BlockRecord {
    std::vector<ChunkRecord> chunks;
    /// Receipts emitted by this block, by target shard; they are the incoming
    /// queues for height + 1.
    std::vector<std::vector<Receipt>> emitted;
    Yocto gas_burned;
    Yocto stranded;  // value of receipts that reverted in this block
  };

  /// Everything needed to restore the chain to the end of one height.
  struct ChainSnapshot {
    std::vector<ledger::LedgerState> states;
    Yocto burned;
    Yocto stranded;
  };

  /// Baseline chain: contiguous blocks from genesis, live per-shard state at
  /// the tip, and per-height snapshots back to the finalized height.
  class ChainView {
   public:
    ChainView(std::vector<ledger::LedgerState> genesis,
              const ledger::ShardMap &shards,
              ledger::ExecutionConfig config = {});

    uint32_t shard_count() const {
      return shards_.shard_count();
    }
    const ledger::ShardMap &shards() const {
      return shards_;
    }
    const ledger::ExecutionConfig &config() const {
      return config_;
    }

    Height tip_height() const {
      return blocks_.back().height;
    }
    Height finalized_height() const {
      return finalized_;
    }
    const Block &tip() const {
      return blocks_.back();
    }
    const Block &block(Height h) const;
    const BlockRecord &record(Height h) const;
    const std::vector<Block> &blocks() const {
      return blocks_;
    }

    /// Per-shard state after the tip.
    const std::vector<ledger::LedgerState> &states() const {
      return live_;
    }
    ledger::LedgerState &state(ShardId shard) {
      return live_[shard.value];
    }
    /// Receipts waiting for inclusion at tip + 1.
    const std::vector<Receipt> &pending_receipts(ShardId shard) const;

    Yocto burned() const {
      return burned_;
    }
    Yocto stranded() const {
      return stranded_;
    }
    Yocto in_flight() const;
    /// Balances + burned + stranded + receipts in flight.
    Yocto accounted_supply() const;

    /// Appends a block whose effects are already applied to the live states.
    void append(Block block, BlockRecord record);

    /// Raises the finalized height (never lowers it) and drops snapshots that
    /// can no longer be rolled back to.
    void finalize_up_to(Height h);

    /// Restores the chain to the end of height `h` (h >= finalized height).
    void truncate_to(Height h);

    /// Burns gas from a sender outside of block execution (rollback penalty).
    Yocto burn_penalty(const AccountId &sender, Yocto gas);

   private:
    const ledger::ShardMap &shards_;
    ledger::ExecutionConfig config_;
    std::vector<Block> blocks_;
    std::vector<BlockRecord> records_;
    // snapshots_[i] is the end of height snapshot_base_ + i.
    std::deque<ChainSnapshot> snapshots_;
    Height snapshot_base_ = 0;
    std::vector<ledger::LedgerState> live_;
    Yocto burned_;
    Yocto stranded_;
    Height finalized_ = 0;
  };

  struct ProducedChunk {
    Chunk chunk;
    ChunkRecord record;
    std::vector<Receipt> emitted;
    Yocto gas_burned;
    Yocto stranded;
    std::vector<TxPtr> included;
    /// Transactions that could not be executed at all (unknown sender).
    std::vector<TxPtr> dropped;
  };

  /// Builds and signs one chunk on `state` (mutated in place): every incoming
  /// receipt first, then up to `max_txs` of `txs` in order.
  ProducedChunk produce_chunk(ShardId shard, std::span<const TxPtr> txs,
                              std::span<const Receipt> incoming,
                              ledger::LedgerState &state, Height height,
                              const RoleId &producer, size_t max_txs,
                              const ledger::ShardMap &shards,
                              const ledger::ExecutionConfig &config);

  struct ProducedBlock {
    std::vector<TxPtr> included;
    std::vector<TxPtr> dropped;
  };

  /// One baseline height: each shard's producer (round-robin over
  /// `producers_per_shard`) takes transactions from the mempool and the
  /// pending receipts, and the block is appended to `chain`.
  ProducedBlock produce_block(ChainView &chain, Mempool &mempool,
                              uint32_t producers_per_shard, size_t max_txs);

  struct Challenge {
    RoleId challenger;
    Digest offending_tx;
    Height block_height = 0;  // block holding the offending transaction
    std::string reason;
  };

  /// Oldest cross-shard transaction above the finalized height whose phase 1
  /// applied at some height h while its receipt reverted at h + 1.
  std::optional<Challenge> detect_inconsistency(const ChainView &chain);

  struct RollbackPolicy {
    bool refund_gas = false;
  };

  struct RollbackResult {
    Height from_tip = 0;
    Height to_tip = 0;
    TxPtr offending;
    /// Non-offending transactions from the cancelled blocks, in chain order.
    std::vector<TxPtr> requeue;
    Yocto gas_penalty;
  };

  /// Truncates to challenge.block_height - 1 and restores every shard's state
  /// to that height. Without refund_gas the offender's gas is burned again on
  /// the restored state. Throws ChainError(kInvalidChallenge) when the
  /// challenge is not backed by the chain.
  RollbackResult rollback(ChainView &chain, const Challenge &challenge,
                          const RollbackPolicy &policy = {});

}  // namespace shardsim::nightshade
