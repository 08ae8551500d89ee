/*
 * Copyright 2026 The SIFL Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef SIFL_BYTES_H_
#define SIFL_BYTES_H_

// Little-endian encoding helpers shared by the key blob and the wire format.

#include <bit>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sifl/error.h"

namespace sifl::bytes {

inline void put_u8(std::vector<std::uint8_t>& out, std::uint8_t v) {
  out.push_back(v);
}

template <typename T>
void put_le(std::vector<std::uint8_t>& out, T v) {
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
}

inline void put_f64(std::vector<std::uint8_t>& out, double v) {
  put_le(out, std::bit_cast<std::uint64_t>(v));
}

// Bounds-checked cursor; every failed read throws DecodeError at the offset of
// the field that could not be read in full.
class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> data) : data_(data) {}

  std::size_t offset() const { return pos_; }
  std::size_t remaining() const { return data_.size() - pos_; }

  void require(std::size_t n, const char* field) const {
    if (remaining() < n) {
      throw DecodeError(std::string("truncated ") + field, pos_);
    }
  }

  std::uint8_t u8(const char* field) {
    require(1, field);
    return data_[pos_++];
  }

  template <typename T>
  T le(const char* field) {
    require(sizeof(T), field);
    T v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      v |= static_cast<T>(static_cast<T>(data_[pos_ + i]) << (8 * i));
    }
    pos_ += sizeof(T);
    return v;
  }

  double f64(const char* field) {
    return std::bit_cast<double>(le<std::uint64_t>(field));
  }

  std::span<const std::uint8_t> take(std::size_t n, const char* field) {
    require(n, field);
    auto out = data_.subspan(pos_, n);
    pos_ += n;
    return out;
  }

 private:
  std::span<const std::uint8_t> data_;
  std::size_t pos_ = 0;
};

}  // namespace sifl::bytes

#endif  // SIFL_BYTES_H_
