/**
 * Copyright shardsim authors
 * SPDX-License-Identifier: Apache-2.0
 */

#include "shardsim/synchro/builder.hpp"

#include <unordered_map>
#include <unordered_set>

namespace shardsim::synchro {

  using ledger::LedgerState;
  using ledger::Receipt;
  using ledger::Transaction;

  bool check_atomicity(const Block &block, const ledger::ShardMap &shards) {
    std::unordered_map<Digest, const Transaction *, DigestHash> cstx;
    for (const auto &c : block.chunks) {
      for (const auto &tx : c.txs) {
        if (!ledger::is_cross_shard(tx, shards)) continue;
        if (!cstx.emplace(tx.id, &tx).second) return false;
      }
    }
    std::unordered_set<Digest, DigestHash> matched;
    for (const auto &c : block.chunks) {
      for (const auto &r : c.receipts) {
        auto it = cstx.find(r.origin_tx);
        if (it == cstx.end()) return false;
        const auto &tx = *it->second;
        if (r.target_shard != c.shard || shards.of(tx.receiver) != c.shard) return false;
        if (ledger::receipt_receiver(r) != tx.receiver
            || ledger::receipt_value(r) != tx.amount) {
          return false;
        }
        if (!matched.insert(r.origin_tx).second) return false;
      }
    }
    return matched.size() == cstx.size();
  }

  TxSource source_from(std::span<const TxPtr> txs, const ledger::ShardMap &shards) {
    std::vector<std::vector<TxPtr>> by_shard(shards.shard_count());
    for (const auto &tx : txs) by_shard[shards.of(tx->sender).value].push_back(tx);
    return [by_shard = std::move(by_shard)](ShardId shard, const TxVisitor &visit) {
      for (const auto &tx : by_shard[shard.value]) {
        if (!visit(tx)) return;
      }
    };
  }

  namespace {
    bool is_call(const Transaction &tx) {
      return tx.kind == ledger::TxKind::kContractCall;
    }

    // Re-executes every chunk from the parent, receipts first, dropping
    // entries that do not apply (and their partners) until a pass is clean.
    // Returns the resulting post-states.
    std::vector<LedgerState> settle_entries(
        std::vector<std::vector<TxPtr>> &txs,
        std::vector<std::vector<Receipt>> &receipts,
        std::span<const LedgerState> parent, const ledger::ShardMap &shards,
        const ledger::ExecutionConfig &exec, std::vector<TxPtr> &deferred) {
      auto s = shards.shard_count();
      while (true) {
        std::unordered_set<Digest, DigestHash> drop;
        std::vector<LedgerState> post(parent.begin(), parent.end());
        for (uint32_t i = 0; i < s; ++i) {
          auto &st = post[i];
          for (const auto &r : receipts[i]) {
            auto out = ledger::execute_receipt(st, r, exec);
            if (!out.applied()) drop.insert(r.origin_tx);
          }
          for (const auto &tx : txs[i]) {
            if (drop.contains(tx->id)) continue;
            if (!ledger::transaction_rejection(st, *tx, shards, exec).empty()) {
              drop.insert(tx->id);
              continue;
            }
            ledger::execute_transaction(st, *tx, shards, exec);
          }
        }
        if (drop.empty()) return post;
        for (uint32_t i = 0; i < s; ++i) {
          std::erase_if(txs[i], [&](const TxPtr &tx) {
            if (!drop.contains(tx->id)) return false;
            deferred.push_back(tx);
            return true;
          });
          std::erase_if(receipts[i],
                        [&](const Receipt &r) { return drop.contains(r.origin_tx); });
        }
      }
    }
  }  // namespace

  BuildResult coordinator_build_block(const RoleId &coordinator, const TxSource &source,
                                      Height height, const Digest &parent_hash,
                                      std::span<const LedgerState> parent_states,
                                      const ledger::ShardMap &shards,
                                      const BuildConfig &config) {
    auto s = shards.shard_count();
    const auto &exec = config.exec;
    BuildResult res;
    // end[i]: state after everything placed so far; recv[i]: state after the
    // receipt phase only, which is where incoming calls are evaluated.
    std::vector<std::optional<LedgerState>> end(s), recv(s);
    auto end_state = [&](ShardId i) -> LedgerState & {
      if (!end[i.value]) end[i.value] = parent_states[i.value];
      return *end[i.value];
    };
    auto recv_state = [&](ShardId i) -> LedgerState & {
      if (!recv[i.value]) recv[i.value] = parent_states[i.value];
      return *recv[i.value];
    };
    std::vector<std::vector<TxPtr>> txs(s);
    std::vector<std::vector<Receipt>> receipts(s);

    for (uint32_t i = 0; i < s; ++i) {
      ShardId shard{i};
      size_t count = 0;
      source(shard, [&](const TxPtr &tx) {
        if (count >= config.max_txs_per_chunk) return false;
        if (config.ignore_user && tx->sender == *config.ignore_user) return true;
        std::string why;
        bool cross = false;
        ShardId to = shard;
        try {
          cross = ledger::is_cross_shard(*tx, shards);
          to = shards.of(tx->receiver);
          why = ledger::transaction_rejection(parent_states[i], *tx, shards, exec);
          if (why.empty() && cross && is_call(*tx)) {
            why = ledger::contract_call_rejection(parent_states[to.value], tx->receiver,
                                                  tx->amount, exec);
          }
        } catch (const ledger::LedgerError &e) {
          why = e.what();
        }
        if (!why.empty()) {
          res.excluded.push_back(tx);
          return true;
        }
        why = ledger::transaction_rejection(end_state(shard), *tx, shards, exec);
        if (why.empty() && cross && is_call(*tx)) {
          why = ledger::contract_call_rejection(recv_state(to), tx->receiver, tx->amount,
                                                exec);
        }
        if (!why.empty()) {
          res.deferred.push_back(tx);
          return true;
        }
        auto out = ledger::execute_transaction(end_state(shard), *tx, shards, exec);
        if (cross) {
          auto &r = *out.emitted_receipt;
          ledger::execute_receipt(recv_state(to), r, exec);
          ledger::execute_receipt(end_state(to), r, exec);
          receipts[to.value].push_back(std::move(r));
        }
        txs[i].push_back(tx);
        ++count;
        return true;
      });
    }

    if (config.cstx_only) {
      for (auto &rs : receipts) rs.clear();
    }
    res.post_states = settle_entries(txs, receipts, parent_states, shards, exec,
                                     res.deferred);

    auto &block = res.candidate.block;
    block.height = height;
    block.parent = parent_hash;
    for (uint32_t i = 0; i < s; ++i) {
      Chunk c;
      c.shard = ShardId{i};
      c.height = height;
      for (const auto &tx : txs[i]) {
        c.txs.push_back(*tx);
        res.included.push_back(tx);
      }
      c.receipts = std::move(receipts[i]);
      c.pre_state_root = parent_states[i].state_root();
      c.post_state_root = res.post_states[i].state_root();
      block.chunks.push_back(std::move(c));
    }
    block.block_hash = nightshade::compute_block_hash(height, parent_hash, block.chunks);
    for (auto &c : block.chunks) {
      c.block_hash = block.block_hash;
      nightshade::sign_chunk(c, coordinator);
    }
    res.candidate.coordinator = coordinator;
    res.candidate.signature = sign(coordinator, block.block_hash);
    return res;
  }

}  // namespace shardsim::synchro
