// Copyright 2026 The fmlab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <string>
#include <string_view>
#include <vector>

#include "fmlab/core/error.hpp"

namespace fmlab::binary {

/// Append-only little-endian encoder, independent of host byte order.
class Writer {
 public:
  void bytes(std::string_view raw) { buffer_.insert(buffer_.end(), raw.begin(), raw.end()); }
  void u32(std::uint32_t v) { put(v, 4); }
  void u64(std::uint64_t v) { put(v, 8); }
  void f64(double v) { put(std::bit_cast<std::uint64_t>(v), 8); }
  const std::vector<char>& buffer() const noexcept { return buffer_; }

 private:
  void put(std::uint64_t v, int width) {
    for (int i = 0; i < width; ++i) buffer_.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
  }
  std::vector<char> buffer_;
};

class Reader {
 public:
  explicit Reader(std::string_view data) : data_(data) {}
  std::string bytes(std::size_t n) {
    need(n);
    std::string out(data_.substr(pos_, n));
    pos_ += n;
    return out;
  }
  std::uint32_t u32() { return static_cast<std::uint32_t>(get(4)); }
  std::uint64_t u64() { return get(8); }
  double f64() { return std::bit_cast<double>(get(8)); }
  std::size_t remaining() const noexcept { return data_.size() - pos_; }

 private:
  void need(std::size_t n) const {
    if (data_.size() - pos_ < n) throw InputError("binary: unexpected end of data");
  }
  std::uint64_t get(int width) {
    need(static_cast<std::size_t>(width));
    std::uint64_t v = 0;
    for (int i = 0; i < width; ++i)
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(data_[pos_ + i])) << (8 * i);
    pos_ += static_cast<std::size_t>(width);
    return v;
  }
  std::string_view data_;
  std::size_t pos_ = 0;
};

}  // namespace fmlab::binary
