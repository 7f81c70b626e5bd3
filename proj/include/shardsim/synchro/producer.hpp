/**
 * Copyright shardsim authors
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

#include <optional>
#include <string>

#include "shardsim/synchro/proof.hpp"

namespace shardsim::synchro {

  struct ChunkVerdict {
    bool accepted = false;
    std::string reason;
    /// Content digest and embedded block hash of the chunk that was checked.
    Digest content_digest;
    std::optional<Digest> block_hash;
    std::optional<ledger::LedgerState> post_state;
  };

  struct VerifyConfig {
    size_t max_txs_per_chunk = 100;
    ledger::ExecutionConfig exec;
  };

  /// Accepts iff the chunk belongs to `shard`, carries a block hash, respects
  /// the size cap, starts from `state`'s root, and re-executes (receipts
  /// first) with every entry applied to exactly post_state_root.
  ChunkVerdict producer_verify_chunk(const Chunk &chunk, ShardId shard,
                                     const ledger::LedgerState &state,
                                     const ledger::ShardMap &shards,
                                     const VerifyConfig &config);

  /// Signs the chunk as `prover` and returns its proof. The modeled proving
  /// cost follows params.proof_policy. Throws
  /// ProofError(kRefusedUnverifiedChunk) unless `verdict` accepted this chunk.
  ValidityProof producer_make_proof(Chunk &chunk, const ChunkVerdict &verdict,
                                    const RoleId &prover,
                                    const sim::SimulationParams &params,
                                    const ProofSystem &system);

  /// What a malformed-chunk producer hands out: the chunk with a flipped bit
  /// in its post-state root, paired with the honest proof.
  Chunk corrupt_chunk(const Chunk &chunk);

}  // namespace shardsim::synchro
