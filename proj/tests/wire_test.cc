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

#include "sifl/wire.h"

#include <gtest/gtest.h>

#include <cstring>
#include <random>

#include "sifl/error.h"
#include "wire_fuzz.h"

namespace sifl {
namespace {

TEST(Wire, EmptyGlobalFrameIsTwentyBytes) {
  const Message m{MessageKind::kGlobal, 0, 0, {}, {}};
  const auto f = encode_message(m);
  ASSERT_EQ(f.size(), 20u);
  EXPECT_EQ(std::memcmp(f.data(), "SIFL", 4), 0);
  EXPECT_EQ(f[4], kWireVersionFloats);
  EXPECT_EQ(f[5], static_cast<std::uint8_t>(MessageKind::kGlobal));
  EXPECT_EQ(decode_message(f), m);
}

TEST(Wire, HeaderFieldsLittleEndian) {
  const Message m{MessageKind::kUpdate, 0x01020304, 0x0a0b, {1.0, 2.0, 3.0}, {}};
  const auto f = encode_message(m);
  ASSERT_EQ(f.size(), 20u + 24u);
  EXPECT_EQ(f[6], 0x04);
  EXPECT_EQ(f[9], 0x01);
  EXPECT_EQ(f[10], 0x0b);
  EXPECT_EQ(f[11], 0x0a);
  EXPECT_EQ(f[12], 3);  // length in floats
  for (int i = 13; i < 20; ++i) EXPECT_EQ(f[i], 0);
  // 1.0 = 0x3ff0000000000000, little-endian.
  EXPECT_EQ(f[27], 0x3f);
  EXPECT_EQ(f[26], 0xf0);
}

TEST(Wire, ThousandFloatUpdateRoundTrips) {
  std::mt19937_64 rng(1);
  std::vector<double> params(998);
  for (double& v : params) v = std::normal_distribution<double>()(rng);
  const Message m = make_update(3, 2, 150, 0.25, params);
  ASSERT_EQ(m.payload.size(), 1000u);
  const auto f = encode_message(m);
  EXPECT_EQ(f.size(), 20u + 8000u);
  EXPECT_EQ(decode_message(f), m);
}

TEST(Wire, KeysetUsesByteVersion) {
  const Message m{MessageKind::kKeyset, 0, 0, {}, {1, 2, 3, 4, 5}};
  const auto f = encode_message(m);
  EXPECT_EQ(f[4], kWireVersionBytes);
  EXPECT_EQ(f[12], 5);  // length in bytes
  EXPECT_EQ(f.size(), 25u);
  EXPECT_EQ(decode_message(f), m);
}

TEST(Wire, FuzzedRoundTrips) {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 2000; ++i) {
    const Message m = testing::random_message(rng);
    const auto f = encode_message(m);
    const Message back = decode_message(f);
    ASSERT_TRUE(testing::bit_equal(back, m)) << i;
    ASSERT_EQ(encode_message(back), f);
  }
}

TEST(Wire, MalformedFramesReportOffsets) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 50; ++i) {
    const Message m = testing::random_message(rng);
    for (const auto& c : testing::malformed_cases(m)) {
      try {
        decode_message(c.frame);
        ADD_FAILURE() << c.name << " accepted";
      } catch (const DecodeError& e) {
        EXPECT_EQ(e.offset(), c.expected_offset) << c.name << ": " << e.what();
        EXPECT_NE(std::string(e.what()).find("byte offset"), std::string::npos);
      }
    }
  }
}

TEST(Wire, XxxxMagicAtOffsetZero) {
  auto f = encode_message(Message{MessageKind::kDone, 1, 0, {}, {}});
  std::memcpy(f.data(), "XXXX", 4);
  try {
    decode_message(f);
    FAIL();
  } catch (const DecodeError& e) {
    EXPECT_EQ(e.offset(), 0u);
  }
}

TEST(Wire, SchemaViolations) {
  // Encoding side.
  EXPECT_THROW(encode_message(Message{MessageKind::kUpdate, 0, 1, {1.0}, {}}),
               InvalidArgument);
  EXPECT_THROW(encode_message(Message{MessageKind::kAggregate, 0, 0, {}, {}}),
               InvalidArgument);
  EXPECT_THROW(encode_message(Message{MessageKind::kDone, 0, 0, {1.0}, {}}),
               InvalidArgument);
  EXPECT_THROW(encode_message(Message{MessageKind::kGlobal, 0, 0, {}, {1}}),
               InvalidArgument);
  EXPECT_THROW(encode_message(Message{MessageKind::kKeyset, 0, 0, {1.0}, {}}),
               InvalidArgument);
  EXPECT_THROW(encode_message(Message{static_cast<MessageKind>(9), 0, 0, {}, {}}),
               InvalidArgument);
  // Decoding side: an UPDATE header announcing a single float.
  auto f = encode_message(Message{MessageKind::kGlobal, 0, 0, {1.0}, {}});
  f[5] = static_cast<std::uint8_t>(MessageKind::kUpdate);
  try {
    decode_message(f);
    FAIL();
  } catch (const DecodeError& e) {
    EXPECT_EQ(e.offset(), 12u);
  }
}

TEST(Wire, HeaderDecoderReportsPayloadSize) {
  const auto f = encode_message(make_aggregate(4, 0.5, std::vector<double>{1, 2}));
  const FrameHeader h = decode_header(std::span(f).first(kFrameHeaderSize));
  EXPECT_EQ(h.kind, MessageKind::kAggregate);
  EXPECT_EQ(h.round, 4u);
  EXPECT_EQ(h.length, 3u);
  EXPECT_EQ(h.payload_bytes(), 24u);
}

}  // namespace
}  // namespace sifl
