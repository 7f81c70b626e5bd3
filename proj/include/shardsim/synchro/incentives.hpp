/**
 * Copyright shardsim authors
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

#include <map>
#include <span>
#include <vector>

#include "shardsim/core/roles.hpp"

namespace shardsim::synchro {

  /// Count of finalized blocks each role contributed to.
  class TrustLedger {
   public:
    uint64_t score(const RoleId &role) const;
    /// Adds one to every role in `contributors`; duplicates count once.
    void credit_block(std::span<const RoleId> contributors);
    const std::map<RoleId, uint64_t> &scores() const {
      return scores_;
    }

   private:
    std::map<RoleId, uint64_t> scores_;
  };

  /// Tokens minted to roles for finalized blocks. Kept apart from user
  /// balances, so it never enters the conservation check.
  class RewardLedger {
   public:
    explicit RewardLedger(uint64_t reward_per_block = 1)
        : reward_per_block_(reward_per_block) {}

    void reward_block(std::span<const RoleId> contributors);
    uint64_t reward(const RoleId &role) const;
    uint64_t reward_per_block() const {
      return reward_per_block_;
    }
    const std::map<RoleId, uint64_t> &rewards() const {
      return rewards_;
    }

   private:
    uint64_t reward_per_block_;
    std::map<RoleId, uint64_t> rewards_;
  };

  /// `roles` sorted by trust, highest first. Roles with equal trust keep their
  /// listed order rotated left by `rotation`, so ties take turns.
  std::vector<RoleId> order_by_trust(const TrustLedger &trust,
                                     std::span<const RoleId> roles, uint64_t rotation);

  /// Highest trust wins; ties are broken round-robin by `rotation`. Throws
  /// std::invalid_argument on an empty list.
  RoleId producer_pick_coordinator(const TrustLedger &trust,
                                   std::span<const RoleId> coordinators,
                                   uint64_t rotation);

}  // namespace shardsim::synchro
