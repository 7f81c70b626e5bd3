/**
 * Copyright shardsim authors
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

#include <map>
#include <optional>
#include <set>
#include <span>
#include <unordered_map>
#include <vector>

#include "shardsim/synchro/builder.hpp"
#include "shardsim/synchro/incentives.hpp"
#include "shardsim/synchro/proof.hpp"

namespace shardsim::synchro {

  /// A proven chunk as handed to the global validators by a producer.
  struct Submission {
    Chunk chunk;
    std::optional<ValidityProof> proof;
  };

  enum class GvError {
    kIncompleteGroup,
    kProofInvalid,
    kParentMismatch,
    kAtomicityViolation,
  };

  std::string to_string(GvError e);

  struct GvRequest {
    Height height = 0;
    Digest parent_hash;
    /// Post-state root of every shard at the parent.
    std::span<const Digest> parent_roots;
    std::span<const Submission> submissions;
    const ledger::ShardMap *shards = nullptr;
    const ProofSystem *proofs = nullptr;
    const TrustLedger *trust = nullptr;
    VirtualTime t_zk_v{0};
    uint64_t rotation = 0;
  };

  struct GvOutcome {
    std::optional<Block> block;
    /// Producer whose submission was used, per shard.
    std::vector<RoleId> producers;
    size_t proofs_checked = 0;
    VirtualTime verify_cost{0};
    /// Every group that was tried and why it was rejected.
    std::vector<std::pair<Digest, GvError>> rejected;
    std::optional<GvError> error;
  };

  /// Groups submissions by their embedded block hash and takes the first group,
  /// in preference order, that has a verified chunk for every shard, hashes to
  /// its group hash over `parent_hash`, continues from `parent_roots` and is
  /// atomic. Groups are preferred by transaction count, then number of
  /// submissions, then lowest hash. Within a shard, submissions are tried in
  /// producer trust order; each proof check costs t_zk_v.
  GvOutcome gv_reconstruct_and_finalize(const GvRequest &request);

  /// One block of a fork and the global validators that signed it.
  struct ForkBlock {
    Digest hash;
    uint64_t signatures = 0;
  };

  /// Picks the chain with the most cumulative signatures; ties go to the
  /// lowest tip hash. Returns the index into `forks`, which must be non-empty.
  size_t fork_choice(std::span<const std::vector<ForkBlock>> forks);

  /// Headers of every block signed by some global validator, rooted at genesis.
  class BlockTree {
   public:
    struct Node {
      Digest hash;
      Digest parent;
      Height height = 0;
      size_t tx_count = 0;
      bool atomic = true;
      std::set<RoleId> signers;
    };

    explicit BlockTree(const Block &genesis);

    /// Records `signer`'s signature on `block`. Throws std::invalid_argument
    /// when the parent is unknown.
    void add(const Block &block, const RoleId &signer, const ledger::ShardMap &shards);
    const Node *find(const Digest &hash) const;
    /// Genesis first.
    std::vector<const Node *> chain_to(const Digest &tip) const;
    std::vector<Digest> leaves() const;
    /// Tip of the chain picked by fork_choice over all leaves.
    Digest best_tip() const;
    const Digest &genesis() const {
      return genesis_;
    }

   private:
    Digest genesis_;
    std::unordered_map<Digest, Node, DigestHash> nodes_;
    std::unordered_map<Digest, size_t, DigestHash> children_;
  };

}  // namespace shardsim::synchro
