/**
 * Copyright shardsim authors
 * SPDX-License-Identifier: Apache-2.0
 */

#include "shardsim/sim/protocol.hpp"

#include "shardsim/sim/params.hpp"

namespace shardsim::sim {

  std::string_view to_string(TxResolution r) {
    switch (r) {
      case TxResolution::kFinalized:
        return "finalized";
      case TxResolution::kFinalizedReverted:
        return "finalized_reverted";
      case TxResolution::kRolledBack:
        return "rolled_back";
      case TxResolution::kExcluded:
        return "excluded";
      case TxResolution::kDropped:
        return "dropped";
    }
    return "?";
  }

  std::string_view to_string(FaultKind k) {
    switch (k) {
      case FaultKind::kIgnoreUser:
        return "ignore_user";
      case FaultKind::kCstxOnlyBlocks:
        return "cstx_only_blocks";
      case FaultKind::kMalformedChunks:
        return "malformed_chunks";
      case FaultKind::kBadCombinations:
        return "bad_combinations";
    }
    return "?";
  }

  FaultKind parse_fault_kind(std::string_view text) {
    for (auto k : {FaultKind::kIgnoreUser, FaultKind::kCstxOnlyBlocks,
                   FaultKind::kMalformedChunks, FaultKind::kBadCombinations}) {
      if (to_string(k) == text) return k;
    }
    throw ConfigError("faults.behavior",
                      "unknown fault behavior '" + std::string(text) + "'");
  }

}  // namespace shardsim::sim
