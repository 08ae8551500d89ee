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

#ifndef SIFL_KEY_IO_H_
#define SIFL_KEY_IO_H_

// Versioned binary KeySet blob:
//
//   "SIKY" | version u8 (=1) | block count u32
//   per block: plain offset u32 | n_j u32 | m_j u32
//              M (n_j x m_j) | G (m_j x n_j) | N (m_j x (m_j - n_j))
//
// Integers are little-endian; matrices are row-major IEEE-754 binary64,
// little-endian. Round trips are bit-exact.

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "sifl/immersion_keys.h"

namespace sifl {

inline constexpr std::uint8_t kKeyBlobVersion = 1;

std::vector<std::uint8_t> serialize_keyset(const KeySet& keys);
// Throws DecodeError for malformed blobs and InvalidArgument if a block's
// matrices violate the key invariants.
KeySet deserialize_keyset(std::span<const std::uint8_t> blob);

void write_keyset_file(const std::filesystem::path& path, const KeySet& keys);
KeySet read_keyset_file(const std::filesystem::path& path);

}  // namespace sifl

#endif  // SIFL_KEY_IO_H_
