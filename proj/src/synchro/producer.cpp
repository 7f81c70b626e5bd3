/**
 * Copyright shardsim authors
 * SPDX-License-Identifier: Apache-2.0
 */

#include "shardsim/synchro/producer.hpp"

namespace shardsim::synchro {

  ChunkVerdict producer_verify_chunk(const Chunk &chunk, ShardId shard,
                                     const ledger::LedgerState &state,
                                     const ledger::ShardMap &shards,
                                     const VerifyConfig &config) {
    ChunkVerdict v;
    v.content_digest = nightshade::chunk_content_digest(chunk);
    v.block_hash = chunk.block_hash;
    auto reject = [&](std::string why) {
      v.reason = std::move(why);
      return v;
    };
    if (chunk.shard != shard) return reject("chunk for another shard");
    if (!chunk.block_hash) return reject("no block hash");
    if (chunk.txs.size() > config.max_txs_per_chunk) return reject("too many transactions");
    for (const auto &tx : chunk.txs) {
      if (shards.of(tx.sender) != shard) return reject("foreign sender");
      if (tx.id != ledger::transaction_id(tx)) return reject("bad transaction id");
    }
    for (const auto &r : chunk.receipts) {
      if (r.target_shard != shard) return reject("foreign receipt");
    }
    if (chunk.pre_state_root != state.state_root()) return reject("pre-state mismatch");
    auto st = state;
    auto ex = nightshade::execute_chunk(st, chunk, shards, config.exec);
    if (ex.malformed) return reject("malformed: " + ex.error);
    if (!ex.all_applied()) return reject("entry does not apply");
    if (ex.post_state_root != chunk.post_state_root) return reject("post-state mismatch");
    v.accepted = true;
    v.post_state = std::move(st);
    return v;
  }

  ValidityProof producer_make_proof(Chunk &chunk, const ChunkVerdict &verdict,
                                    const RoleId &prover,
                                    const sim::SimulationParams &params,
                                    const ProofSystem &system) {
    if (!verdict.accepted || verdict.block_hash != chunk.block_hash
        || verdict.content_digest != nightshade::chunk_content_digest(chunk)) {
      throw ProofError(ProofError::Code::kRefusedUnverifiedChunk,
                       "chunk was not verified: " + verdict.reason);
    }
    if (prover.kind != RoleKind::kProducer || prover.shard != chunk.shard) {
      throw ProofError(ProofError::Code::kRefusedUnverifiedChunk,
                       prover.to_string() + " cannot prove for shard "
                           + std::to_string(chunk.shard.value));
    }
    nightshade::sign_chunk(chunk, prover);
    return system.attest(chunk, prover,
                         sim::proving_cost(params.proof_policy, chunk.txs.size(),
                                           params.t_zk_p),
                         params.t_zk_v);
  }

  Chunk corrupt_chunk(const Chunk &chunk) {
    auto bad = chunk;
    bad.post_state_root.bytes[0] ^= 0x01;
    return bad;
  }

}  // namespace shardsim::synchro
