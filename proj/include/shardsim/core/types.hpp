/**
 * Copyright shardsim authors
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

#include <array>
#include <chrono>
#include <compare>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>

namespace shardsim {

  /// 256-bit digest. Ordering is lexicographic over the bytes, which is also
  /// the ordering used by every hash tie-break in the simulator.
  struct Digest {
    std::array<uint8_t, 32> bytes{};

    auto operator<=>(const Digest &) const = default;

    std::string hex() const;
    std::string short_hex() const;  // first 8 hex chars, for logs
    static Digest from_hex(std::string_view hex);
  };

  struct DigestHash {
    size_t operator()(const Digest &d) const noexcept;
  };

  struct AccountId {
    std::string name;

    auto operator<=>(const AccountId &) const = default;
  };

  struct AccountIdHash {
    size_t operator()(const AccountId &a) const noexcept {
      return std::hash<std::string>{}(a.name);
    }
  };

  struct ShardId {
    uint32_t value = 0;

    auto operator<=>(const ShardId &) const = default;
  };

  using Height = uint64_t;

  /// Virtual time. All timing arithmetic is integer microseconds so that the
  /// cost-model identities (e.g. 100 x 4.3 ms = 430 ms) hold exactly.
  using VirtualTime = std::chrono::microseconds;

  VirtualTime seconds_to_virtual(double seconds);
  double virtual_to_seconds(VirtualTime t);

  /// Token amount in yocto units (1 NEAR = 10^24 yocto). Never negative.
  struct Yocto {
    unsigned __int128 value = 0;

    constexpr Yocto() = default;
    constexpr explicit Yocto(unsigned __int128 v) : value(v) {}

    auto operator<=>(const Yocto &) const = default;

    constexpr Yocto operator+(Yocto o) const {
      return Yocto{value + o.value};
    }
    /// Caller guarantees `o <= *this`.
    constexpr Yocto operator-(Yocto o) const {
      return Yocto{value - o.value};
    }
    constexpr Yocto operator*(uint64_t k) const {
      return Yocto{value * k};
    }
    Yocto &operator+=(Yocto o) {
      value += o.value;
      return *this;
    }
    Yocto &operator-=(Yocto o) {
      value -= o.value;
      return *this;
    }

    /// Decimal yocto string.
    std::string to_string() const;
    /// Human form, e.g. "6.99 NEAR".
    std::string to_near_string() const;

    /// Accepts a plain integer (yocto) or a decimal followed by "NEAR",
    /// e.g. "1.5 NEAR". Throws std::invalid_argument on malformed input.
    static Yocto parse(std::string_view text);
  };

  inline constexpr unsigned __int128 kYoctoPerNear =
      static_cast<unsigned __int128>(1'000'000'000'000ULL)
      * static_cast<unsigned __int128>(1'000'000'000'000ULL);

  constexpr Yocto near(uint64_t whole) {
    return Yocto{kYoctoPerNear * whole};
  }

  /// `milli` thousandths of a NEAR.
  constexpr Yocto milli_near(uint64_t milli) {
    return Yocto{kYoctoPerNear / 1000 * milli};
  }

  /// Signed balance change, wide enough for any Yocto.
  using YoctoDelta = __int128;

}  // namespace shardsim
