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

#include "sifl/aggregator.h"

#include <cmath>
#include <string>
#include <utility>

#include "sifl/error.h"
#include "sifl/kernels.h"

namespace sifl {

EncryptedParamVector aggregate(std::span<const EncryptedParamVector> updates,
                               std::span<const std::size_t> sizes) {
  if (updates.empty()) throw ProtocolError("aggregate: no updates");
  if (updates.size() != sizes.size()) {
    throw ProtocolError("aggregate: " + std::to_string(updates.size()) +
                        " updates but " + std::to_string(sizes.size()) +
                        " sizes");
  }
  const std::uint32_t round = updates.front().round;
  const std::size_t dim = updates.front().size();
  std::size_t total = 0;
  for (std::size_t i = 0; i < updates.size(); ++i) {
    if (updates[i].round != round) {
      throw ProtocolError("aggregate: update " + std::to_string(i) +
                          " is from round " + std::to_string(updates[i].round) +
                          ", expected " + std::to_string(round));
    }
    if (updates[i].size() != dim) {
      throw ProtocolError("aggregate: update " + std::to_string(i) + " has " +
                          std::to_string(updates[i].size()) +
                          " entries, expected " + std::to_string(dim));
    }
    if (sizes[i] == 0) {
      throw ProtocolError("aggregate: dataset size of update " +
                          std::to_string(i) + " is zero");
    }
    total += sizes[i];
  }
  EncryptedParamVector out{std::vector<double>(dim, 0.0), round};
  for (std::size_t i = 0; i < updates.size(); ++i) {
    kernels::axpy(static_cast<double>(sizes[i]), updates[i].values, out.values);
  }
  const auto denom = static_cast<double>(total);
  for (double& v : out.values) v /= denom;
  return out;
}

Aggregator::Aggregator(std::size_t num_clients) : num_clients_(num_clients) {
  if (num_clients == 0 || num_clients > 0xffff) {
    throw InvalidArgument("Aggregator: client count must be in [1, 65535]");
  }
}

void Aggregator::begin_round(std::uint32_t round) {
  round_ = round;
  open_ = true;
  pending_.clear();
}

void Aggregator::accept(const Message& update) {
  if (!open_) throw ProtocolError("aggregator: no open round");
  if (update.kind != MessageKind::kUpdate) {
    throw ProtocolError("aggregator: expected UPDATE, got " +
                        std::string(kind_name(update.kind)));
  }
  const std::uint16_t id = update.client_id;
  if (id == 0 || id > num_clients_) {
    throw ProtocolError("aggregator: unknown client " + std::to_string(id));
  }
  if (update.round != round_) {
    throw ProtocolError("aggregator: client " + std::to_string(id) +
                        " sent round " + std::to_string(update.round) +
                        " during round " + std::to_string(round_));
  }
  if (pending_.contains(id)) {
    throw ProtocolError("aggregator: duplicate update from client " +
                        std::to_string(id));
  }
  if (update.payload.size() < 2) {
    throw ProtocolError("aggregator: truncated update from client " +
                        std::to_string(id));
  }
  const double size = update.payload[0];
  if (!(size >= 1.0) || size != std::floor(size) || size > 9007199254740992.0) {
    throw ProtocolError("aggregator: invalid dataset size from client " +
                        std::to_string(id));
  }
  pending_.emplace(
      id, Pending{static_cast<std::size_t>(size), update.payload[1],
                  EncryptedParamVector{std::vector<double>(update.payload.begin() + 2,
                                                           update.payload.end()),
                                       update.round}});
}

std::vector<std::uint16_t> Aggregator::missing() const {
  std::vector<std::uint16_t> out;
  for (std::size_t id = 1; id <= num_clients_; ++id) {
    if (!pending_.contains(static_cast<std::uint16_t>(id))) {
      out.push_back(static_cast<std::uint16_t>(id));
    }
  }
  return out;
}

Message Aggregator::finish() {
  if (!open_) throw ProtocolError("aggregator: no open round");
  if (const auto gone = missing(); !gone.empty()) {
    throw ProtocolError("aggregator: missing update from client " +
                        std::to_string(gone.front()) + " in round " +
                        std::to_string(round_));
  }
  std::vector<EncryptedParamVector> updates;
  std::vector<std::size_t> sizes;
  double weighted_loss = 0.0;
  std::size_t total = 0;
  for (auto& [id, p] : pending_) {  // std::map: ascending client id
    weighted_loss += static_cast<double>(p.size) * p.loss;
    total += p.size;
    sizes.push_back(p.size);
    updates.push_back(std::move(p.params));
  }
  const EncryptedParamVector combined = aggregate(updates, sizes);
  open_ = false;
  pending_.clear();
  return make_aggregate(round_, weighted_loss / static_cast<double>(total),
                        combined.values);
}

}  // namespace sifl
