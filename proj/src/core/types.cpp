/**
 * Copyright shardsim authors
 * SPDX-License-Identifier: Apache-2.0
 */

#include "shardsim/core/types.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>

namespace shardsim {

  namespace {
    constexpr char kHex[] = "0123456789abcdef";

    int hex_value(char c) {
      if (c >= '0' && c <= '9') return c - '0';
      if (c >= 'a' && c <= 'f') return c - 'a' + 10;
      if (c >= 'A' && c <= 'F') return c - 'A' + 10;
      return -1;
    }

    std::string trim(std::string_view s) {
      auto b = s.find_first_not_of(" \t");
      if (b == std::string_view::npos) return {};
      auto e = s.find_last_not_of(" \t");
      return std::string(s.substr(b, e - b + 1));
    }

    unsigned __int128 parse_digits(std::string_view digits) {
      constexpr unsigned __int128 kMax = ~static_cast<unsigned __int128>(0);
      unsigned __int128 v = 0;
      for (char c : digits) {
        if (c < '0' || c > '9') {
          throw std::invalid_argument("not a decimal amount");
        }
        if (v > (kMax - (c - '0')) / 10) {
          throw std::invalid_argument("amount overflows 128 bits");
        }
        v = v * 10 + static_cast<unsigned>(c - '0');
      }
      return v;
    }
  }  // namespace

  std::string Digest::hex() const {
    std::string out;
    out.reserve(64);
    for (auto b : bytes) {
      out.push_back(kHex[b >> 4]);
      out.push_back(kHex[b & 0xf]);
    }
    return out;
  }

  std::string Digest::short_hex() const {
    return hex().substr(0, 8);
  }

  Digest Digest::from_hex(std::string_view hex) {
    if (hex.size() != 64) {
      throw std::invalid_argument("digest hex must be 64 characters");
    }
    Digest d;
    for (size_t i = 0; i < 32; ++i) {
      int hi = hex_value(hex[2 * i]);
      int lo = hex_value(hex[2 * i + 1]);
      if (hi < 0 || lo < 0) {
        throw std::invalid_argument("digest hex has non-hex character");
      }
      d.bytes[i] = static_cast<uint8_t>(hi << 4 | lo);
    }
    return d;
  }

  size_t DigestHash::operator()(const Digest &d) const noexcept {
    size_t h;
    std::memcpy(&h, d.bytes.data(), sizeof(h));
    return h;
  }

  VirtualTime seconds_to_virtual(double seconds) {
    return VirtualTime{std::llround(seconds * 1e6)};
  }

  double virtual_to_seconds(VirtualTime t) {
    return static_cast<double>(t.count()) / 1e6;
  }

  std::string Yocto::to_string() const {
    if (value == 0) return "0";
    std::string out;
    auto v = value;
    while (v != 0) {
      out.push_back(static_cast<char>('0' + static_cast<int>(v % 10)));
      v /= 10;
    }
    std::reverse(out.begin(), out.end());
    return out;
  }

  std::string Yocto::to_near_string() const {
    auto whole = value / kYoctoPerNear;
    auto frac = value % kYoctoPerNear;
    std::string out = Yocto{whole}.to_string();
    if (frac != 0) {
      std::string f = Yocto{frac}.to_string();
      f.insert(0, 24 - f.size(), '0');
      while (!f.empty() && f.back() == '0') f.pop_back();
      out += "." + f;
    }
    return out + " NEAR";
  }

  Yocto Yocto::parse(std::string_view text) {
    auto t = trim(text);
    if (t.empty()) throw std::invalid_argument("empty amount");
    constexpr std::string_view kSuffix = "NEAR";
    if (t.size() > kSuffix.size()
        && std::string_view(t).substr(t.size() - kSuffix.size()) == kSuffix) {
      auto number = trim(std::string_view(t).substr(0, t.size() - kSuffix.size()));
      auto dot = number.find('.');
      std::string whole = number.substr(0, dot);
      std::string frac = dot == std::string::npos ? "" : number.substr(dot + 1);
      if (whole.empty() && frac.empty()) {
        throw std::invalid_argument("empty NEAR amount");
      }
      if (frac.size() > 24) {
        throw std::invalid_argument("more than 24 decimals in NEAR amount");
      }
      frac.append(24 - frac.size(), '0');
      auto w = whole.empty() ? 0 : parse_digits(whole);
      auto f = parse_digits(frac);
      return Yocto{w * kYoctoPerNear + f};
    }
    return Yocto{parse_digits(t)};
  }

}  // namespace shardsim
