/**
 * Copyright shardsim authors
 * SPDX-License-Identifier: Apache-2.0
 */

#include "shardsim/nightshade/chunk.hpp"

#include <algorithm>

namespace shardsim::nightshade {

  namespace {
    void encode_content(ByteWriter &w, const Chunk &c) {
      w.u32(c.shard.value).u64(c.height);
      w.u32(static_cast<uint32_t>(c.txs.size()));
      for (const auto &tx : c.txs) ledger::encode(w, tx);
      w.u32(static_cast<uint32_t>(c.receipts.size()));
      for (const auto &r : c.receipts) ledger::encode(w, r);
      w.digest(c.pre_state_root).digest(c.post_state_root);
    }
  }  // namespace

  Digest chunk_content_digest(const Chunk &chunk) {
    ByteWriter w;
    w.str("shardsim/chunk-content");
    encode_content(w, chunk);
    return w.finish();
  }

  std::vector<uint8_t> encode_chunk(const Chunk &chunk) {
    ByteWriter w;
    w.str("shardsim/chunk");
    encode_content(w, chunk);
    w.str(chunk.producer.to_string());
    if (chunk.block_hash) {
      w.u8(1).digest(*chunk.block_hash);
    } else {
      w.u8(0);
    }
    return w.take();
  }

  Chunk decode_chunk(std::span<const uint8_t> bytes) {
    ByteReader r(bytes);
    if (r.str() != "shardsim/chunk") throw std::invalid_argument("not a chunk");
    Chunk c;
    c.shard = ShardId{r.u32()};
    c.height = r.u64();
    auto ntx = r.u32();
    if (ntx > bytes.size()) throw std::out_of_range("transaction count");
    for (uint32_t i = 0; i < ntx; ++i) c.txs.push_back(ledger::decode_transaction(r));
    auto nrc = r.u32();
    if (nrc > bytes.size()) throw std::out_of_range("receipt count");
    for (uint32_t i = 0; i < nrc; ++i) c.receipts.push_back(ledger::decode_receipt(r));
    c.pre_state_root = r.digest();
    c.post_state_root = r.digest();
    c.producer = RoleId::parse(r.str());
    auto tag = r.u8();
    if (tag == 1) {
      c.block_hash = r.digest();
    } else if (tag != 0) {
      throw std::invalid_argument("bad block hash tag");
    }
    if (!r.done()) throw std::invalid_argument("trailing bytes");
    auto again = encode_chunk(c);
    if (!std::equal(again.begin(), again.end(), bytes.begin(), bytes.end())) {
      throw std::invalid_argument("non-canonical chunk encoding");
    }
    return c;
  }

  Digest chunk_digest(const Chunk &chunk) {
    return sha256(encode_chunk(chunk));
  }

  void sign_chunk(Chunk &chunk, const RoleId &producer) {
    chunk.producer = producer;
    chunk.signature = sign(producer, chunk_digest(chunk));
  }

  bool chunk_signature_valid(const Chunk &chunk) {
    return verify_signature(chunk.producer, chunk_digest(chunk), chunk.signature);
  }

  bool ChunkExecution::all_applied() const {
    auto ok = [](ledger::OutcomeStatus s) {
      return s == ledger::OutcomeStatus::kApplied;
    };
    return !malformed && std::all_of(tx_status.begin(), tx_status.end(), ok)
        && std::all_of(receipt_status.begin(), receipt_status.end(), ok);
  }

  ChunkExecution execute_chunk(ledger::LedgerState &state, const Chunk &chunk,
                               const ledger::ShardMap &shards,
                               const ledger::ExecutionConfig &config) {
    ChunkExecution ex;
    try {
      for (const auto &r : chunk.receipts) {
        auto out = ledger::execute_receipt(state, r, config);
        ex.receipt_status.push_back(out.status);
      }
      for (const auto &tx : chunk.txs) {
        auto out = ledger::execute_transaction(state, tx, shards, config);
        ex.tx_status.push_back(out.status);
        ex.gas_burned += out.gas_burned;
        if (out.emitted_receipt) ex.emitted.push_back(std::move(*out.emitted_receipt));
      }
    } catch (const ledger::LedgerError &e) {
      ex.malformed = true;
      ex.error = e.what();
    }
    ex.post_state_root = state.state_root();
    return ex;
  }

  size_t Block::tx_count() const {
    size_t n = 0;
    for (const auto &c : chunks) n += c.txs.size();
    return n;
  }

  Digest compute_block_hash(Height height, const Digest &parent,
                            std::span<const Chunk> chunks) {
    ByteWriter w;
    w.str("shardsim/block").u64(height).digest(parent);
    w.u32(static_cast<uint32_t>(chunks.size()));
    for (const auto &c : chunks) w.digest(chunk_content_digest(c));
    return w.finish();
  }

  Block genesis_block(uint32_t shard_count,
                      std::span<const ledger::LedgerState> genesis_states) {
    Block b;
    b.height = 0;
    for (uint32_t s = 0; s < shard_count; ++s) {
      Chunk c;
      c.shard = ShardId{s};
      c.height = 0;
      c.pre_state_root = genesis_states[s].state_root();
      c.post_state_root = c.pre_state_root;
      b.chunks.push_back(std::move(c));
    }
    b.block_hash = compute_block_hash(0, b.parent, b.chunks);
    return b;
  }

  Block assemble_block(std::vector<Chunk> chunks, const Block &parent,
                       uint32_t shard_count) {
    using Code = ChainError::Code;
    Height height = parent.height + 1;
    std::vector<std::optional<Chunk>> slots(shard_count);
    for (auto &c : chunks) {
      if (c.height != height) {
        throw ChainError(Code::kHeightMismatch,
                         "chunk for shard " + std::to_string(c.shard.value)
                             + " is at height " + std::to_string(c.height)
                             + ", expected " + std::to_string(height));
      }
      if (c.shard.value >= shard_count) {
        throw ChainError(Code::kMissingChunk,
                         "chunk for unknown shard " + std::to_string(c.shard.value));
      }
      auto &slot = slots[c.shard.value];
      if (slot) {
        throw ChainError(Code::kDuplicateChunk,
                         "two chunks for shard " + std::to_string(c.shard.value));
      }
      slot = std::move(c);
    }
    Block b;
    b.height = height;
    b.parent = parent.block_hash;
    for (uint32_t s = 0; s < shard_count; ++s) {
      if (!slots[s]) {
        throw ChainError(Code::kMissingChunk,
                         "no chunk for shard " + std::to_string(s));
      }
      b.chunks.push_back(std::move(*slots[s]));
    }
    b.block_hash = compute_block_hash(height, b.parent, b.chunks);
    return b;
  }

}  // namespace shardsim::nightshade
