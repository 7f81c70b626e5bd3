/**
 * Copyright shardsim authors
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

#include <deque>
#include <functional>
#include <unordered_map>
#include <vector>

#include "shardsim/core/ledger.hpp"

namespace shardsim::nightshade {

  using ledger::TxPtr;

  /// Pending transactions, one FIFO per sender shard. Removal by id is lazy.
  class Mempool {
   public:
    explicit Mempool(const ledger::ShardMap &shards);

    /// Returns false if the id is already pending.
    bool add(TxPtr tx);

    /// Puts `txs` ahead of everything already queued, preserving their order
    /// within each shard. Ids already pending are skipped.
    void requeue_front(const std::vector<TxPtr> &txs);

    /// Removes and returns up to `max` transactions from the head of `shard`.
    std::vector<TxPtr> take(ShardId shard, size_t max);

    /// Visits live entries of `shard` in queue order until `fn` returns false.
    void visit(ShardId shard, const std::function<bool(const TxPtr &)> &fn) const;

    bool erase(const Digest &id);
    bool contains(const Digest &id) const {
      return live_.contains(id);
    }
    size_t size() const {
      return live_.size();
    }
    size_t size(ShardId shard) const;
    /// The pending transaction with this id, or null.
    TxPtr find(const Digest &id) const;

   private:
    // An entry is live while live_[id] still carries its generation, so an
    // erased and re-added transaction never resurrects the stale entry.
    struct Entry {
      uint64_t generation;
      TxPtr tx;
    };
    bool is_live(const Entry &e) const;
    void trim(std::deque<Entry> &q);

    const ledger::ShardMap &shards_;
    std::vector<std::deque<Entry>> queues_;
    std::vector<size_t> live_per_shard_;
    std::unordered_map<Digest, uint64_t, DigestHash> live_;
    std::unordered_map<Digest, TxPtr, DigestHash> by_id_;
    uint64_t next_generation_ = 0;
  };

}  // namespace shardsim::nightshade
