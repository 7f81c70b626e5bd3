/**
 * Copyright shardsim authors
 * SPDX-License-Identifier: Apache-2.0
 */

#include "shardsim/nightshade/chain.hpp"

#include <memory>

namespace shardsim::nightshade {

  using ledger::OutcomeStatus;

  ChainView::ChainView(std::vector<ledger::LedgerState> genesis,
                       const ledger::ShardMap &shards,
                       ledger::ExecutionConfig config)
      : shards_(shards), config_(config), live_(std::move(genesis)) {
    if (live_.size() != shards_.shard_count()) {
      throw std::invalid_argument("genesis must hold one state per shard");
    }
    blocks_.push_back(genesis_block(shards_.shard_count(), live_));
    BlockRecord rec;
    rec.chunks.resize(shards_.shard_count());
    rec.emitted.resize(shards_.shard_count());
    records_.push_back(std::move(rec));
    snapshots_.push_back({live_, {}, {}});
  }

  const Block &ChainView::block(Height h) const {
    return blocks_.at(h);
  }

  const BlockRecord &ChainView::record(Height h) const {
    return records_.at(h);
  }

  const std::vector<Receipt> &ChainView::pending_receipts(ShardId shard) const {
    return records_.back().emitted.at(shard.value);
  }

  Yocto ChainView::in_flight() const {
    Yocto sum;
    for (const auto &queue : records_.back().emitted) {
      for (const auto &r : queue) sum += ledger::receipt_value(r);
    }
    return sum;
  }

  Yocto ChainView::accounted_supply() const {
    Yocto sum = burned_ + stranded_ + in_flight();
    for (const auto &st : live_) sum += st.total_balance();
    return sum;
  }

  void ChainView::append(Block block, BlockRecord record) {
    if (block.height != tip_height() + 1 || block.parent != tip().block_hash) {
      throw ChainError(ChainError::Code::kHeightMismatch,
                       "block does not extend the tip");
    }
    burned_ += record.gas_burned;
    stranded_ += record.stranded;
    blocks_.push_back(std::move(block));
    records_.push_back(std::move(record));
    snapshots_.push_back({live_, burned_, stranded_});
  }

  void ChainView::finalize_up_to(Height h) {
    if (h > tip_height()) h = tip_height();
    if (h <= finalized_) return;
    finalized_ = h;
    while (snapshot_base_ < finalized_) {
      snapshots_.pop_front();
      ++snapshot_base_;
    }
  }

  void ChainView::truncate_to(Height h) {
    if (h < finalized_ || h > tip_height()) {
      throw ChainError(ChainError::Code::kInvalidChallenge,
                       "cannot restore height " + std::to_string(h));
    }
    blocks_.resize(h + 1);
    records_.resize(h + 1);
    snapshots_.resize(h - snapshot_base_ + 1);
    const auto &snap = snapshots_.back();
    live_ = snap.states;
    burned_ = snap.burned;
    stranded_ = snap.stranded;
  }

  Yocto ChainView::burn_penalty(const AccountId &sender, Yocto gas) {
    auto &st = live_[shards_.of(sender).value];
    auto burn = std::min(gas, st.balance(sender));
    if (burn != Yocto{}) st.debit(sender, burn);
    burned_ += burn;
    // The penalty is part of the restored tip state from now on.
    snapshots_.back() = {live_, burned_, stranded_};
    return burn;
  }

  ProducedChunk produce_chunk(ShardId shard, std::span<const TxPtr> txs,
                              std::span<const Receipt> incoming,
                              ledger::LedgerState &state, Height height,
                              const RoleId &producer, size_t max_txs,
                              const ledger::ShardMap &shards,
                              const ledger::ExecutionConfig &config) {
    ProducedChunk out;
    auto &c = out.chunk;
    c.shard = shard;
    c.height = height;
    c.pre_state_root = state.state_root();
    for (const auto &r : incoming) {
      auto res = ledger::execute_receipt(state, r, config);
      if (!res.applied()) out.stranded += ledger::receipt_value(r);
      out.record.receipt_status.push_back(res.status);
      c.receipts.push_back(r);
    }
    for (const auto &tx : txs) {
      if (out.included.size() >= max_txs) break;
      try {
        auto res = ledger::execute_transaction(state, *tx, shards, config);
        out.record.tx_status.push_back(res.status);
        out.gas_burned += res.gas_burned;
        if (res.emitted_receipt) out.emitted.push_back(std::move(*res.emitted_receipt));
        c.txs.push_back(*tx);
        out.included.push_back(tx);
      } catch (const ledger::LedgerError &) {
        out.dropped.push_back(tx);
      }
    }
    c.post_state_root = state.state_root();
    sign_chunk(c, producer);
    return out;
  }

  ProducedBlock produce_block(ChainView &chain, Mempool &mempool,
                              uint32_t producers_per_shard, size_t max_txs) {
    auto s = chain.shard_count();
    Height height = chain.tip_height() + 1;
    std::vector<Chunk> chunks;
    BlockRecord rec;
    rec.emitted.resize(s);
    ProducedBlock result;
    for (uint32_t i = 0; i < s; ++i) {
      ShardId shard{i};
      auto producer = RoleId::producer(
          shard, static_cast<uint32_t>(height % producers_per_shard));
      auto txs = mempool.take(shard, max_txs);
      auto incoming = chain.pending_receipts(shard);
      auto pc = produce_chunk(shard, txs, incoming, chain.state(shard), height,
                              producer, max_txs, chain.shards(), chain.config());
      for (auto &r : pc.emitted) rec.emitted[r.target_shard.value].push_back(std::move(r));
      rec.chunks.push_back(std::move(pc.record));
      rec.gas_burned += pc.gas_burned;
      rec.stranded += pc.stranded;
      result.included.insert(result.included.end(), pc.included.begin(),
                             pc.included.end());
      result.dropped.insert(result.dropped.end(), pc.dropped.begin(),
                            pc.dropped.end());
      chunks.push_back(std::move(pc.chunk));
    }
    auto block = assemble_block(std::move(chunks), chain.tip(), s);
    chain.append(std::move(block), std::move(rec));
    return result;
  }

  std::optional<Challenge> detect_inconsistency(const ChainView &chain) {
    // Receipts at height h + 1 come from phase 1 at h, so the first reverted
    // receipt in height order names the oldest offending transaction.
    for (Height h = chain.finalized_height() + 1; h <= chain.tip_height(); ++h) {
      const auto &b = chain.block(h);
      const auto &rec = chain.record(h);
      for (size_t c = 0; c < b.chunks.size(); ++c) {
        const auto &chunk = b.chunks[c];
        for (size_t i = 0; i < chunk.receipts.size(); ++i) {
          if (rec.chunks[c].receipt_status[i] != OutcomeStatus::kReverted) continue;
          const auto &r = chunk.receipts[i];
          if (h - 1 <= chain.finalized_height()) continue;
          return Challenge{RoleId::producer(chunk.shard, 0), r.origin_tx, h - 1,
                           "receipt " + r.id.short_hex() + " reverted at height "
                               + std::to_string(h)};
        }
      }
    }
    return std::nullopt;
  }

  RollbackResult rollback(ChainView &chain, const Challenge &challenge,
                          const RollbackPolicy &policy) {
    using Code = ChainError::Code;
    auto bh = challenge.block_height;
    if (bh == 0) {
      throw ChainError(Code::kInvalidChallenge, "genesis cannot be rolled back");
    }
    if (bh > chain.tip_height()) {
      throw ChainError(Code::kInvalidChallenge,
                       "challenged height " + std::to_string(bh) + " is above the tip");
    }
    if (bh <= chain.finalized_height()) {
      throw ChainError(Code::kInvalidChallenge,
                       "challenged height " + std::to_string(bh) + " is finalized");
    }
    const Transaction *offending = nullptr;
    for (const auto &c : chain.block(bh).chunks) {
      for (const auto &tx : c.txs) {
        if (tx.id == challenge.offending_tx) offending = &tx;
      }
    }
    if (offending == nullptr) {
      throw ChainError(Code::kInvalidChallenge,
                       "transaction " + challenge.offending_tx.short_hex()
                           + " is not in block " + std::to_string(bh));
    }

    RollbackResult res;
    res.from_tip = chain.tip_height();
    res.offending = std::make_shared<const Transaction>(*offending);
    for (Height h = bh; h <= chain.tip_height(); ++h) {
      for (const auto &c : chain.block(h).chunks) {
        for (const auto &tx : c.txs) {
          if (tx.id != challenge.offending_tx) {
            res.requeue.push_back(std::make_shared<const Transaction>(tx));
          }
        }
      }
    }
    chain.truncate_to(bh - 1);
    res.to_tip = chain.tip_height();
    if (!policy.refund_gas) {
      res.gas_penalty = chain.burn_penalty(res.offending->sender, res.offending->gas);
    }
    return res;
  }

}  // namespace shardsim::nightshade
