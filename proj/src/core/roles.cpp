/**
 * Copyright shardsim authors
 * SPDX-License-Identifier: Apache-2.0
 */

#include "shardsim/core/roles.hpp"

#include <charconv>
#include <stdexcept>
#include <vector>

#include "shardsim/core/hash.hpp"

namespace shardsim {

  namespace {
    std::vector<std::string_view> split(std::string_view s, char sep) {
      std::vector<std::string_view> parts;
      size_t start = 0;
      while (true) {
        auto pos = s.find(sep, start);
        parts.push_back(s.substr(start, pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
      }
      return parts;
    }

    uint32_t parse_index(std::string_view s) {
      uint32_t v = 0;
      auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) {
        throw std::invalid_argument("bad role index: " + std::string(s));
      }
      return v;
    }
  }  // namespace

  std::string RoleId::to_string() const {
    switch (kind) {
      case RoleKind::kCoordinator:
        return "coordinator/" + std::to_string(index);
      case RoleKind::kProducer:
        return "producer/" + std::to_string(shard ? shard->value : 0) + "/"
             + std::to_string(index);
      case RoleKind::kGlobalValidator:
        return "gv/" + std::to_string(index);
    }
    return "?";
  }

  RoleId RoleId::parse(std::string_view text) {
    auto parts = split(text, '/');
    if (parts.size() == 2 && parts[0] == "coordinator") {
      return coordinator(parse_index(parts[1]));
    }
    if (parts.size() == 2 && parts[0] == "gv") {
      return global_validator(parse_index(parts[1]));
    }
    if (parts.size() == 3 && parts[0] == "producer") {
      return producer(ShardId{parse_index(parts[1])}, parse_index(parts[2]));
    }
    throw std::invalid_argument("unrecognised role: " + std::string(text));
  }

  Digest RoleId::signing_key() const {
    return ByteWriter{}.str("shardsim/role-key").str(to_string()).finish();
  }

  Digest sign(const RoleId &signer, const Digest &message) {
    auto key = signer.signing_key();
    return hmac_sha256(key.bytes, message.bytes);
  }

  bool verify_signature(const RoleId &signer, const Digest &message,
                        const Digest &signature) {
    return sign(signer, message) == signature;
  }

}  // namespace shardsim
