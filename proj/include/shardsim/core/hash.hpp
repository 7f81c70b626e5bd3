/**
 * Copyright shardsim authors
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "shardsim/core/types.hpp"

namespace shardsim {

  // SHA-256 is the single digest used across the simulator (state roots,
  // transaction ids, block hashes, shard assignment). Changing it invalidates
  // the golden values in tests/unit/core_hash_test.cpp.
  Digest sha256(std::span<const uint8_t> data);
  Digest sha256(std::string_view text);
  Digest hmac_sha256(std::span<const uint8_t> key, std::span<const uint8_t> msg);

  /// Canonical encoder: integers big-endian, variable-length fields prefixed
  /// with a u32 length.
  class ByteWriter {
   public:
    ByteWriter &u8(uint8_t v);
    ByteWriter &u32(uint32_t v);
    ByteWriter &u64(uint64_t v);
    ByteWriter &u128(unsigned __int128 v);
    ByteWriter &yocto(Yocto v) {
      return u128(v.value);
    }
    ByteWriter &str(std::string_view s);
    ByteWriter &digest(const Digest &d);
    ByteWriter &raw(std::span<const uint8_t> data);

    const std::vector<uint8_t> &bytes() const {
      return buf_;
    }
    std::vector<uint8_t> take() {
      return std::move(buf_);
    }
    Digest finish() const {
      return sha256(buf_);
    }

   private:
    std::vector<uint8_t> buf_;
  };

  /// Reads what ByteWriter wrote. Every accessor throws std::out_of_range on
  /// truncated input.
  class ByteReader {
   public:
    explicit ByteReader(std::span<const uint8_t> data) : data_(data) {}

    uint8_t u8();
    uint32_t u32();
    uint64_t u64();
    unsigned __int128 u128();
    Yocto yocto() {
      return Yocto{u128()};
    }
    std::string str();
    Digest digest();

    bool done() const {
      return pos_ == data_.size();
    }

   private:
    void need(size_t n) const;

    std::span<const uint8_t> data_;
    size_t pos_ = 0;
  };

}  // namespace shardsim
