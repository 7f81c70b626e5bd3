/**
 * Copyright shardsim authors
 * SPDX-License-Identifier: Apache-2.0
 */

#include "shardsim/synchro/incentives.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace shardsim::synchro {

  uint64_t TrustLedger::score(const RoleId &role) const {
    auto it = scores_.find(role);
    return it == scores_.end() ? 0 : it->second;
  }

  void TrustLedger::credit_block(std::span<const RoleId> contributors) {
    std::set<RoleId> once(contributors.begin(), contributors.end());
    for (const auto &r : once) ++scores_[r];
  }

  void RewardLedger::reward_block(std::span<const RoleId> contributors) {
    std::set<RoleId> once(contributors.begin(), contributors.end());
    for (const auto &r : once) rewards_[r] += reward_per_block_;
  }

  uint64_t RewardLedger::reward(const RoleId &role) const {
    auto it = rewards_.find(role);
    return it == rewards_.end() ? 0 : it->second;
  }

  std::vector<RoleId> order_by_trust(const TrustLedger &trust,
                                     std::span<const RoleId> roles, uint64_t rotation) {
    std::vector<RoleId> out(roles.begin(), roles.end());
    if (out.empty()) return out;
    std::rotate(out.begin(),
                out.begin() + static_cast<std::ptrdiff_t>(rotation % out.size()),
                out.end());
    std::stable_sort(out.begin(), out.end(), [&](const RoleId &a, const RoleId &b) {
      return trust.score(a) > trust.score(b);
    });
    return out;
  }

  RoleId producer_pick_coordinator(const TrustLedger &trust,
                                   std::span<const RoleId> coordinators,
                                   uint64_t rotation) {
    if (coordinators.empty()) throw std::invalid_argument("no coordinators");
    return order_by_trust(trust, coordinators, rotation).front();
  }

}  // namespace shardsim::synchro
