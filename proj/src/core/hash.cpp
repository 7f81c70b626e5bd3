/**
 * Copyright shardsim authors
 * SPDX-License-Identifier: Apache-2.0
 */

#include "shardsim/core/hash.hpp"

#include <openssl/evp.h>
#include <openssl/hmac.h>

#include <algorithm>
#include <stdexcept>

namespace shardsim {

  Digest sha256(std::span<const uint8_t> data) {
    Digest d;
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), d.bytes.data(), &len,
                   EVP_sha256(), nullptr)
            != 1
        || len != d.bytes.size()) {
      throw std::runtime_error("sha256 failed");
    }
    return d;
  }

  Digest sha256(std::string_view text) {
    return sha256(std::span<const uint8_t>(
        reinterpret_cast<const uint8_t *>(text.data()), text.size()));
  }

  Digest hmac_sha256(std::span<const uint8_t> key,
                     std::span<const uint8_t> msg) {
    Digest d;
    unsigned int len = 0;
    if (HMAC(EVP_sha256(), key.data(), static_cast<int>(key.size()),
             msg.data(), msg.size(), d.bytes.data(), &len)
            == nullptr
        || len != d.bytes.size()) {
      throw std::runtime_error("hmac-sha256 failed");
    }
    return d;
  }

  ByteWriter &ByteWriter::u8(uint8_t v) {
    buf_.push_back(v);
    return *this;
  }

  ByteWriter &ByteWriter::u32(uint32_t v) {
    for (int shift = 24; shift >= 0; shift -= 8) {
      buf_.push_back(static_cast<uint8_t>(v >> shift));
    }
    return *this;
  }

  ByteWriter &ByteWriter::u64(uint64_t v) {
    for (int shift = 56; shift >= 0; shift -= 8) {
      buf_.push_back(static_cast<uint8_t>(v >> shift));
    }
    return *this;
  }

  ByteWriter &ByteWriter::u128(unsigned __int128 v) {
    u64(static_cast<uint64_t>(v >> 64));
    u64(static_cast<uint64_t>(v));
    return *this;
  }

  ByteWriter &ByteWriter::str(std::string_view s) {
    u32(static_cast<uint32_t>(s.size()));
    buf_.insert(buf_.end(), s.begin(), s.end());
    return *this;
  }

  ByteWriter &ByteWriter::digest(const Digest &d) {
    buf_.insert(buf_.end(), d.bytes.begin(), d.bytes.end());
    return *this;
  }

  ByteWriter &ByteWriter::raw(std::span<const uint8_t> data) {
    buf_.insert(buf_.end(), data.begin(), data.end());
    return *this;
  }

  void ByteReader::need(size_t n) const {
    if (data_.size() - pos_ < n) throw std::out_of_range("truncated input");
  }

  uint8_t ByteReader::u8() {
    need(1);
    return data_[pos_++];
  }

  uint32_t ByteReader::u32() {
    need(4);
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v = (v << 8) | data_[pos_++];
    return v;
  }

  uint64_t ByteReader::u64() {
    need(8);
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v = (v << 8) | data_[pos_++];
    return v;
  }

  unsigned __int128 ByteReader::u128() {
    unsigned __int128 hi = u64();
    return (hi << 64) | u64();
  }

  std::string ByteReader::str() {
    auto n = u32();
    need(n);
    std::string out(reinterpret_cast<const char *>(data_.data() + pos_), n);
    pos_ += n;
    return out;
  }

  Digest ByteReader::digest() {
    need(32);
    Digest d;
    std::copy_n(data_.begin() + static_cast<std::ptrdiff_t>(pos_), 32, d.bytes.begin());
    pos_ += 32;
    return d;
  }

}  // namespace shardsim
