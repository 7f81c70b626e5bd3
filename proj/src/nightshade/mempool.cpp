/**
 * Copyright shardsim authors
 * SPDX-License-Identifier: Apache-2.0
 */

#include "shardsim/nightshade/mempool.hpp"

#include <map>

namespace shardsim::nightshade {

  Mempool::Mempool(const ledger::ShardMap &shards)
      : shards_(shards),
        queues_(shards.shard_count()),
        live_per_shard_(shards.shard_count(), 0) {}

  bool Mempool::is_live(const Entry &e) const {
    auto it = live_.find(e.tx->id);
    return it != live_.end() && it->second == e.generation;
  }

  void Mempool::trim(std::deque<Entry> &q) {
    while (!q.empty() && !is_live(q.front())) q.pop_front();
  }

  bool Mempool::add(TxPtr tx) {
    if (live_.contains(tx->id)) return false;
    auto gen = next_generation_++;
    live_.emplace(tx->id, gen);
    by_id_.emplace(tx->id, tx);
    auto shard = shards_.of(tx->sender).value;
    queues_[shard].push_back({gen, std::move(tx)});
    ++live_per_shard_[shard];
    return true;
  }

  void Mempool::requeue_front(const std::vector<TxPtr> &txs) {
    std::map<uint32_t, std::vector<Entry>> per_shard;
    for (const auto &tx : txs) {
      if (live_.contains(tx->id)) continue;
      auto gen = next_generation_++;
      live_.emplace(tx->id, gen);
      by_id_.emplace(tx->id, tx);
      auto shard = shards_.of(tx->sender).value;
      per_shard[shard].push_back({gen, tx});
      ++live_per_shard_[shard];
    }
    for (auto &[shard, entries] : per_shard) {
      auto &q = queues_[shard];
      q.insert(q.begin(), entries.begin(), entries.end());
    }
  }

  std::vector<TxPtr> Mempool::take(ShardId shard, size_t max) {
    std::vector<TxPtr> out;
    auto &q = queues_[shard.value];
    while (out.size() < max && !q.empty()) {
      auto e = std::move(q.front());
      q.pop_front();
      if (!is_live(e)) continue;
      live_.erase(e.tx->id);
      by_id_.erase(e.tx->id);
      --live_per_shard_[shard.value];
      out.push_back(std::move(e.tx));
    }
    trim(q);
    return out;
  }

  void Mempool::visit(ShardId shard,
                      const std::function<bool(const TxPtr &)> &fn) const {
    for (const auto &e : queues_[shard.value]) {
      if (!is_live(e)) continue;
      if (!fn(e.tx)) return;
    }
  }

  bool Mempool::erase(const Digest &id) {
    auto it = live_.find(id);
    if (it == live_.end()) return false;
    live_.erase(it);
    auto shard = shards_.of(by_id_.at(id)->sender).value;
    by_id_.erase(id);
    --live_per_shard_[shard];
    // The queue entry stays in place and is skipped; compact once dead
    // entries dominate.
    auto &q = queues_[shard];
    trim(q);
    if (q.size() > 64 && q.size() > 4 * live_per_shard_[shard]) {
      std::deque<Entry> kept;
      for (auto &e : q) {
        if (is_live(e)) kept.push_back(std::move(e));
      }
      q.swap(kept);
    }
    return true;
  }

  TxPtr Mempool::find(const Digest &id) const {
    auto it = by_id_.find(id);
    return it == by_id_.end() ? nullptr : it->second;
  }

  size_t Mempool::size(ShardId shard) const {
    return live_per_shard_[shard.value];
  }

}  // namespace shardsim::nightshade
