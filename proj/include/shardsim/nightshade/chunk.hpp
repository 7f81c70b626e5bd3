/**
 * Copyright shardsim authors
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "shardsim/core/ledger.hpp"
#include "shardsim/core/roles.hpp"

namespace shardsim::nightshade {

  using ledger::Receipt;
  using ledger::Transaction;

  /// Per-shard sub-block. Receipts execute before transactions.
  struct Chunk {
    ShardId shard;
    Height height = 0;
    std::vector<Transaction> txs;
    std::vector<Receipt> receipts;
    Digest pre_state_root;
    Digest post_state_root;
    RoleId producer;
    Digest signature;
    /// Set by a coordinator; absent in the baseline protocol.
    std::optional<Digest> block_hash;

    bool operator==(const Chunk &) const = default;
  };

  /// Digest over the chunk's content (shard, height, entries, roots). The
  /// producer, the signature and the embedded block hash are left out: a block
  /// hash commits to this, and identical candidates from different builders
  /// hash identically.
  Digest chunk_content_digest(const Chunk &chunk);

  /// Canonical bytes of the chunk: content, producer and embedded block hash,
  /// without the signature. Validity proofs bind sha256 of these bytes.
  std::vector<uint8_t> encode_chunk(const Chunk &chunk);
  /// Inverse of encode_chunk (signature left empty). Throws std::out_of_range,
  /// std::invalid_argument or LedgerError on malformed input.
  Chunk decode_chunk(std::span<const uint8_t> bytes);
  Digest chunk_digest(const Chunk &chunk);

  void sign_chunk(Chunk &chunk, const RoleId &producer);
  bool chunk_signature_valid(const Chunk &chunk);

  struct ChunkExecution {
    std::vector<ledger::OutcomeStatus> receipt_status;
    std::vector<ledger::OutcomeStatus> tx_status;
    std::vector<Receipt> emitted;
    Yocto gas_burned;
    Digest post_state_root;
    /// True when some entry could not be executed at all (unknown sender,
    /// wrong shard). Such a chunk is invalid.
    bool malformed = false;
    std::string error;

    bool all_applied() const;
  };

  /// Re-executes `chunk` on `state` (mutated in place): receipts first, then
  /// transactions, in listed order.
  ChunkExecution execute_chunk(ledger::LedgerState &state, const Chunk &chunk,
                               const ledger::ShardMap &shards,
                               const ledger::ExecutionConfig &config = {});

  struct Block {
    Height height = 0;
    Digest parent;
    std::vector<Chunk> chunks;  // index == shard
    Digest block_hash;

    size_t tx_count() const;
    bool operator==(const Block &) const = default;
  };

  Digest compute_block_hash(Height height, const Digest &parent,
                            std::span<const Chunk> chunks);

  Block genesis_block(uint32_t shard_count,
                      std::span<const ledger::LedgerState> genesis_states);

  class ChainError : public std::runtime_error {
   public:
    enum class Code {
      kMissingChunk,
      kDuplicateChunk,
      kHeightMismatch,
      kInvalidChallenge,
    };

    ChainError(Code code, const std::string &what)
        : std::runtime_error(what), code_(code) {}
    Code code() const {
      return code_;
    }

   private:
    Code code_;
  };

  /// Orders chunks by shard and computes the block hash. Every shard must
  /// appear exactly once and every chunk must sit at parent.height + 1.
  Block assemble_block(std::vector<Chunk> chunks, const Block &parent,
                       uint32_t shard_count);

}  // namespace shardsim::nightshade
