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

#ifndef SIFL_WIRE_H_
#define SIFL_WIRE_H_

// Frame layout (all integers little-endian):
//
//   offset  size  field
//        0     4  magic "SIFL"
//        4     1  version: 0x01 float payload, 0x02 byte payload (KEYSET only)
//        5     1  kind
//        6     4  round
//       10     2  client id (0 = server / aggregator)
//       12     8  payload length (floats for v1, bytes for v2)
//       20     *  payload (binary64 LE for v1, raw bytes for v2)
//
// Payload schemas:
//   HELLO      client -> aggregator: empty. server -> aggregator: [N_c].
//   KEYSET     serialized KeySet blob (bytes).
//   GLOBAL     broadcast global parameters (encrypted in SIFL mode).
//   UPDATE     [|D_i|, mean local loss, updated parameters...]
//   AGGREGATE  [size-weighted mean loss, aggregated parameters...]
//   DONE       empty.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace sifl {

inline constexpr std::size_t kFrameHeaderSize = 20;
inline constexpr std::uint8_t kWireVersionFloats = 0x01;
inline constexpr std::uint8_t kWireVersionBytes = 0x02;

enum class MessageKind : std::uint8_t {
  kHello = 1,
  kKeyset = 2,
  kGlobal = 3,
  kUpdate = 4,
  kAggregate = 5,
  kDone = 6,
};

std::string_view kind_name(MessageKind kind);

struct Message {
  MessageKind kind = MessageKind::kHello;
  std::uint32_t round = 0;
  std::uint16_t client_id = 0;
  std::vector<double> payload;      // every kind except KEYSET
  std::vector<std::uint8_t> bytes;  // KEYSET only

  friend bool operator==(const Message&, const Message&) = default;
};

// Throws InvalidArgument if the message violates its kind's schema.
std::vector<std::uint8_t> encode_message(const Message& msg);
// Throws DecodeError carrying the byte offset of the first bad field.
Message decode_message(std::span<const std::uint8_t> frame);

struct FrameHeader {
  std::uint8_t version;
  MessageKind kind;
  std::uint32_t round;
  std::uint16_t client_id;
  std::uint64_t length;

  // Payload size in bytes implied by version and length.
  std::size_t payload_bytes() const;
};

// Validates and parses the fixed 20-byte header (used by stream readers).
FrameHeader decode_header(std::span<const std::uint8_t> header);

// UPDATE / AGGREGATE payload helpers.
Message make_update(std::uint32_t round, std::uint16_t client_id,
                    std::size_t dataset_size, double loss,
                    std::span<const double> params);
Message make_aggregate(std::uint32_t round, double loss,
                       std::span<const double> params);

}  // namespace sifl

#endif  // SIFL_WIRE_H_
