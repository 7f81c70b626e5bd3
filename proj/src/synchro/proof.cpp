/**
 * Copyright shardsim authors
 * SPDX-License-Identifier: Apache-2.0
 */

#include "shardsim/synchro/proof.hpp"

namespace shardsim::synchro {

  ProofSystem::ProofSystem(bool unsound_proofs)
      : key_(sha256(std::string_view("shardsim/proof-system"))),
        unsound_(unsound_proofs) {}

  Digest ProofSystem::attestation(const ValidityProof &p) const {
    ByteWriter w;
    w.str(p.prover.to_string())
        .digest(p.chunk_digest)
        .digest(p.pre_state_root)
        .digest(p.post_state_root);
    return hmac_sha256(key_.bytes, w.bytes());
  }

  ValidityProof ProofSystem::attest(const Chunk &chunk, const RoleId &prover,
                                    VirtualTime prove_cost,
                                    VirtualTime verify_cost) const {
    ValidityProof p;
    p.chunk_digest = nightshade::chunk_digest(chunk);
    p.pre_state_root = chunk.pre_state_root;
    p.post_state_root = chunk.post_state_root;
    p.prover = prover;
    p.modeled_prove_cost = prove_cost;
    p.modeled_verify_cost = verify_cost;
    p.attestation = attestation(p);
    return p;
  }

  ValidityProof ProofSystem::forge(const Chunk &chunk, const RoleId &prover,
                                   VirtualTime prove_cost,
                                   VirtualTime verify_cost) const {
    if (!unsound_) {
      throw ProofError(ProofError::Code::kUnsoundDisabled,
                       "proof forgery requires unsound_proofs");
    }
    return attest(chunk, prover, prove_cost, verify_cost);
  }

  bool ProofSystem::verify(const ValidityProof &proof, const Chunk &chunk) const {
    if (proof.prover.kind != RoleKind::kProducer || proof.prover.shard != chunk.shard) {
      return false;
    }
    if (proof.pre_state_root != chunk.pre_state_root
        || proof.post_state_root != chunk.post_state_root) {
      return false;
    }
    if (proof.chunk_digest != nightshade::chunk_digest(chunk)) return false;
    return proof.attestation == attestation(proof);
  }

}  // namespace shardsim::synchro
