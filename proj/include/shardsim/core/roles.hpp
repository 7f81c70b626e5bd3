/**
 * Copyright shardsim authors
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

#include <compare>
#include <optional>
#include <string>
#include <string_view>

#include "shardsim/core/types.hpp"

namespace shardsim {

  enum class RoleKind : uint8_t {
    kCoordinator = 0,
    kProducer = 1,
    kGlobalValidator = 2,
  };

  /// Identity of a protocol participant. Producers belong to a shard;
  /// coordinators and global validators do not.
  ///
  /// Text form: "coordinator/<i>", "producer/<shard>/<i>", "gv/<i>".
  struct RoleId {
    RoleKind kind = RoleKind::kCoordinator;
    uint32_t index = 0;
    std::optional<ShardId> shard;

    auto operator<=>(const RoleId &) const = default;

    static RoleId coordinator(uint32_t i) {
      return {RoleKind::kCoordinator, i, std::nullopt};
    }
    static RoleId producer(ShardId shard, uint32_t i) {
      return {RoleKind::kProducer, i, shard};
    }
    static RoleId global_validator(uint32_t i) {
      return {RoleKind::kGlobalValidator, i, std::nullopt};
    }

    std::string to_string() const;
    /// Throws std::invalid_argument on malformed text.
    static RoleId parse(std::string_view text);

    /// Simulated signing key; stable per identity.
    Digest signing_key() const;
  };

  /// Keyed digest standing in for a signature scheme.
  Digest sign(const RoleId &signer, const Digest &message);
  bool verify_signature(const RoleId &signer, const Digest &message,
                        const Digest &signature);

}  // namespace shardsim
