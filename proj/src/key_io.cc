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

#include "sifl/key_io.h"

#include <algorithm>
#include <fstream>
#include <iterator>
#include <string>
#include <utility>

#include "sifl/bytes.h"
#include "sifl/error.h"

namespace sifl {
namespace {

constexpr char kMagic[4] = {'S', 'I', 'K', 'Y'};

void put_matrix(std::vector<std::uint8_t>& out, const Matrix& m) {
  for (double v : m.data()) bytes::put_f64(out, v);
}

Matrix read_matrix(bytes::Reader& in, std::size_t rows, std::size_t cols,
                   const char* field) {
  in.require(rows * cols * 8, field);
  std::vector<double> data(rows * cols);
  for (double& v : data) v = in.f64(field);
  return Matrix(rows, cols, std::move(data));
}

}  // namespace

std::vector<std::uint8_t> serialize_keyset(const KeySet& keys) {
  std::vector<std::uint8_t> out;
  out.insert(out.end(), std::begin(kMagic), std::end(kMagic));
  bytes::put_u8(out, kKeyBlobVersion);
  bytes::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(keys.block_count()));
  for (std::size_t j = 0; j < keys.block_count(); ++j) {
    const BlockLayout& b = keys.layout(j);
    bytes::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(b.plain_offset));
    bytes::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(b.plain_dim));
    bytes::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(b.immersed_dim));
    put_matrix(out, keys.block(j).decryption());
    put_matrix(out, keys.block(j).encoding());
    put_matrix(out, keys.block(j).kernel());
  }
  return out;
}

KeySet deserialize_keyset(std::span<const std::uint8_t> blob) {
  bytes::Reader in(blob);
  const auto magic = in.take(4, "magic");
  if (!std::equal(magic.begin(), magic.end(), std::begin(kMagic))) {
    throw DecodeError("bad key blob magic", 0);
  }
  const std::size_t version_at = in.offset();
  if (in.u8("version") != kKeyBlobVersion) {
    throw DecodeError("unsupported key blob version", version_at);
  }
  const std::size_t count_at = in.offset();
  const std::uint32_t count = in.le<std::uint32_t>("block count");
  if (count == 0) throw DecodeError("key blob has no blocks", count_at);

  std::vector<ImmersionKey> blocks;
  std::size_t expected_offset = 0;
  for (std::uint32_t j = 0; j < count; ++j) {
    const std::size_t header_at = in.offset();
    const std::uint32_t offset = in.le<std::uint32_t>("block offset");
    const std::uint32_t n = in.le<std::uint32_t>("block plain dimension");
    const std::uint32_t m = in.le<std::uint32_t>("block immersed dimension");
    if (offset != expected_offset) {
      throw DecodeError("block " + std::to_string(j) + " is not contiguous",
                        header_at);
    }
    if (n == 0 || m <= n) {
      throw DecodeError("block " + std::to_string(j) + " has invalid dimensions",
                        header_at + 4);
    }
    Matrix dec = read_matrix(in, n, m, "decryption matrix");
    Matrix enc = read_matrix(in, m, n, "encoding matrix");
    Matrix ker = read_matrix(in, m, m - n, "kernel matrix");
    blocks.push_back(ImmersionKey::from_matrices(std::move(dec), std::move(enc),
                                                 std::move(ker)));
    expected_offset += n;
  }
  if (in.remaining() != 0) {
    throw DecodeError("trailing bytes after key blob", in.offset());
  }
  return KeySet(std::move(blocks));
}

void write_keyset_file(const std::filesystem::path& path, const KeySet& keys) {
  const auto blob = serialize_keyset(keys);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(reinterpret_cast<const char*>(blob.data()),
            static_cast<std::streamsize>(blob.size()));
  if (!out) throw Error("cannot write key file " + path.string());
}

KeySet read_keyset_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open key file " + path.string());
  std::vector<std::uint8_t> blob((std::istreambuf_iterator<char>(in)),
                                 std::istreambuf_iterator<char>());
  return deserialize_keyset(blob);
}

}  // namespace sifl
