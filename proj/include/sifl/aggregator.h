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

#ifndef SIFL_AGGREGATOR_H_
#define SIFL_AGGREGATOR_H_

// The untrusted aggregator. It only ever handles encrypted vectors and dataset
// sizes: this header and its library deliberately have no dependency on the
// key machinery, so there is no code path from here to a plaintext model.

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "sifl/vectors.h"
#include "sifl/wire.h"

namespace sifl {

// sum_i (|D_i| / |D|) v_i, evaluated as (sum_i |D_i| v_i) / |D| in the given
// order. Throws ProtocolError on mixed rounds, mixed dimensions, zero sizes or
// an empty update list.
EncryptedParamVector aggregate(std::span<const EncryptedParamVector> updates,
                               std::span<const std::size_t> sizes);

// Buffers one round of UPDATE frames and emits a single AGGREGATE once every
// client has reported. Summation runs in ascending client id, independent of
// arrival order.
class Aggregator {
 public:
  // Client ids are 1..num_clients.
  explicit Aggregator(std::size_t num_clients);

  void begin_round(std::uint32_t round);
  // Throws ProtocolError for a frame of the wrong kind or round, an unknown or
  // duplicate client id, or a malformed size field.
  void accept(const Message& update);

  bool complete() const { return pending_.size() == num_clients_; }
  std::vector<std::uint16_t> missing() const;

  // AGGREGATE frame for the current round. Throws ProtocolError naming the
  // first missing client if the round is incomplete.
  Message finish();

  std::size_t num_clients() const { return num_clients_; }
  std::uint32_t round() const { return round_; }

 private:
  struct Pending {
    std::size_t size;
    double loss;
    EncryptedParamVector params;
  };

  std::size_t num_clients_;
  std::uint32_t round_ = 0;
  bool open_ = false;
  std::map<std::uint16_t, Pending> pending_;
};

}  // namespace sifl

#endif  // SIFL_AGGREGATOR_H_
