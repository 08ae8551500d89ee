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

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "sifl/bytes.h"
#include "sifl/error.h"

namespace sifl {
namespace {

constexpr std::uint8_t kMagic[4] = {'S', 'I', 'F', 'L'};

bool valid_kind(std::uint8_t k) {
  return k >= static_cast<std::uint8_t>(MessageKind::kHello) &&
         k <= static_cast<std::uint8_t>(MessageKind::kDone);
}

std::uint8_t version_for(MessageKind kind) {
  return kind == MessageKind::kKeyset ? kWireVersionBytes : kWireVersionFloats;
}

// Minimum float count per kind; DONE must be empty.
std::size_t min_payload(MessageKind kind) {
  switch (kind) {
    case MessageKind::kUpdate:
      return 2;
    case MessageKind::kAggregate:
      return 1;
    default:
      return 0;
  }
}

}  // namespace

std::string_view kind_name(MessageKind kind) {
  switch (kind) {
    case MessageKind::kHello:
      return "HELLO";
    case MessageKind::kKeyset:
      return "KEYSET";
    case MessageKind::kGlobal:
      return "GLOBAL";
    case MessageKind::kUpdate:
      return "UPDATE";
    case MessageKind::kAggregate:
      return "AGGREGATE";
    case MessageKind::kDone:
      return "DONE";
  }
  return "?";
}

std::size_t FrameHeader::payload_bytes() const {
  return version == kWireVersionBytes ? static_cast<std::size_t>(length)
                                      : static_cast<std::size_t>(length) * 8;
}

std::vector<std::uint8_t> encode_message(const Message& msg) {
  if (!valid_kind(static_cast<std::uint8_t>(msg.kind))) {
    throw InvalidArgument("encode_message: invalid kind");
  }
  const bool is_keyset = msg.kind == MessageKind::kKeyset;
  if (is_keyset ? !msg.payload.empty() : !msg.bytes.empty()) {
    throw InvalidArgument(std::string("encode_message: ") +
                          std::string(kind_name(msg.kind)) +
                          " carries the wrong payload type");
  }
  if (msg.payload.size() < min_payload(msg.kind) ||
      (msg.kind == MessageKind::kDone && !msg.payload.empty())) {
    throw InvalidArgument(std::string("encode_message: ") +
                          std::string(kind_name(msg.kind)) +
                          " payload violates its schema");
  }
  std::vector<std::uint8_t> out;
  out.reserve(kFrameHeaderSize +
              (is_keyset ? msg.bytes.size() : msg.payload.size() * 8));
  for (std::uint8_t c : kMagic) bytes::put_u8(out, c);
  bytes::put_u8(out, version_for(msg.kind));
  bytes::put_u8(out, static_cast<std::uint8_t>(msg.kind));
  bytes::put_le<std::uint32_t>(out, msg.round);
  bytes::put_le<std::uint16_t>(out, msg.client_id);
  if (is_keyset) {
    bytes::put_le<std::uint64_t>(out, msg.bytes.size());
    out.insert(out.end(), msg.bytes.begin(), msg.bytes.end());
  } else {
    bytes::put_le<std::uint64_t>(out, msg.payload.size());
    for (double v : msg.payload) bytes::put_f64(out, v);
  }
  return out;
}

FrameHeader decode_header(std::span<const std::uint8_t> header) {
  bytes::Reader in(header);
  const auto magic = in.take(4, "magic");
  if (!std::equal(magic.begin(), magic.end(), std::begin(kMagic))) {
    throw DecodeError("bad frame magic", 0);
  }
  FrameHeader h{};
  h.version = in.u8("version");
  if (h.version != kWireVersionFloats && h.version != kWireVersionBytes) {
    throw DecodeError("unsupported frame version", 4);
  }
  const std::uint8_t kind = in.u8("kind");
  if (!valid_kind(kind)) throw DecodeError("unknown message kind", 5);
  h.kind = static_cast<MessageKind>(kind);
  if (h.version != version_for(h.kind)) {
    throw DecodeError(std::string("version does not match kind ") +
                          std::string(kind_name(h.kind)),
                      4);
  }
  h.round = in.le<std::uint32_t>("round");
  h.client_id = in.le<std::uint16_t>("client id");
  h.length = in.le<std::uint64_t>("payload length");
  if (h.version == kWireVersionFloats &&
      h.length > std::numeric_limits<std::uint64_t>::max() / 8) {
    throw DecodeError("payload length overflows", 12);
  }
  if (h.kind == MessageKind::kDone && h.length != 0) {
    throw DecodeError("DONE frame carries a payload", 12);
  }
  if (h.length < min_payload(h.kind)) {
    throw DecodeError(std::string(kind_name(h.kind)) +
                          " payload shorter than its schema",
                      12);
  }
  return h;
}

Message decode_message(std::span<const std::uint8_t> frame) {
  if (frame.size() < kFrameHeaderSize) {
    // Locate the first field that is cut short.
    decode_header(frame);
  }
  const FrameHeader h = decode_header(frame.first(kFrameHeaderSize));
  bytes::Reader in(frame);
  in.take(kFrameHeaderSize, "header");
  Message msg{h.kind, h.round, h.client_id, {}, {}};
  if (h.version == kWireVersionBytes) {
    const auto body = in.take(static_cast<std::size_t>(
                                  std::min<std::uint64_t>(h.length, in.remaining())),
                              "payload");
    if (body.size() != h.length) {
      throw DecodeError("truncated payload", kFrameHeaderSize + body.size());
    }
    msg.bytes.assign(body.begin(), body.end());
  } else {
    if (h.length > in.remaining() / 8) {
      throw DecodeError("truncated payload",
                        kFrameHeaderSize + (in.remaining() / 8) * 8);
    }
    msg.payload.resize(static_cast<std::size_t>(h.length));
    for (double& v : msg.payload) v = in.f64("payload");
  }
  if (in.remaining() != 0) {
    throw DecodeError("trailing bytes after payload", in.offset());
  }
  return msg;
}

Message make_update(std::uint32_t round, std::uint16_t client_id,
                    std::size_t dataset_size, double loss,
                    std::span<const double> params) {
  Message msg{MessageKind::kUpdate, round, client_id, {}, {}};
  msg.payload.reserve(params.size() + 2);
  msg.payload.push_back(static_cast<double>(dataset_size));
  msg.payload.push_back(loss);
  msg.payload.insert(msg.payload.end(), params.begin(), params.end());
  return msg;
}

Message make_aggregate(std::uint32_t round, double loss,
                       std::span<const double> params) {
  Message msg{MessageKind::kAggregate, round, 0, {}, {}};
  msg.payload.reserve(params.size() + 1);
  msg.payload.push_back(loss);
  msg.payload.insert(msg.payload.end(), params.begin(), params.end());
  return msg;
}

}  // namespace sifl
