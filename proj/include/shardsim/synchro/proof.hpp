/**
 * Copyright shardsim authors
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

#include <stdexcept>

#include "shardsim/nightshade/chunk.hpp"
#include "shardsim/sim/params.hpp"

namespace shardsim::synchro {

  using nightshade::Chunk;

  /// Simulated validity proof: a keyed digest standing in for a succinct
  /// proof, plus the modeled costs of making and checking it.
  struct ValidityProof {
    Digest chunk_digest;
    Digest pre_state_root;
    Digest post_state_root;
    RoleId prover;
    Digest attestation;
    VirtualTime modeled_prove_cost{0};
    VirtualTime modeled_verify_cost{0};

    bool operator==(const ValidityProof &) const = default;
  };

  class ProofError : public std::runtime_error {
   public:
    enum class Code { kRefusedUnverifiedChunk, kUnsoundDisabled };
    ProofError(Code code, const std::string &what)
        : std::runtime_error(what), code_(code) {}
    Code code() const {
      return code_;
    }

   private:
    Code code_;
  };

  /// Holds the attestation key. Honest producers only obtain attestations for
  /// chunks they re-executed; `forge` exists for Byzantine provers and works
  /// only when the system was created with unsound proofs enabled.
  class ProofSystem {
   public:
    explicit ProofSystem(bool unsound_proofs = false);

    /// Attests that `chunk` moves pre_state_root to post_state_root. Callers
    /// must have re-executed the chunk (see producer_make_proof).
    ValidityProof attest(const Chunk &chunk, const RoleId &prover,
                         VirtualTime prove_cost, VirtualTime verify_cost) const;

    ValidityProof forge(const Chunk &chunk, const RoleId &prover,
                        VirtualTime prove_cost, VirtualTime verify_cost) const;

    /// True iff the proof names this exact chunk (bytes and roots) and carries
    /// a genuine attestation from a producer of the chunk's shard.
    bool verify(const ValidityProof &proof, const Chunk &chunk) const;

    bool unsound() const {
      return unsound_;
    }

   private:
    Digest attestation(const ValidityProof &p) const;

    Digest key_;
    bool unsound_;
  };

}  // namespace shardsim::synchro
