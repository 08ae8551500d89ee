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

#ifndef SIFL_DATASETS_H_
#define SIFL_DATASETS_H_

// Dataset ingestion: MNIST-style IDX files and seeded synthetic class blobs.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "sifl/config.h"
#include "sifl/federation.h"
#include "sifl/model.h"

namespace sifl {

inline constexpr std::uint32_t kIdxImageMagic = 0x00000803;
inline constexpr std::uint32_t kIdxLabelMagic = 0x00000801;

// Pixels are scaled to [0, 1]. `limit` > 0 keeps only the first `limit`
// samples. Throws DatasetError (kIo, kMagicMismatch, kTruncated,
// kCountMismatch, kFormat).
Dataset load_idx_dataset(const std::filesystem::path& images,
                         const std::filesystem::path& labels,
                         std::size_t limit = 0);

struct SyntheticSpec {
  std::size_t features = 8;
  std::size_t classes = 3;
  std::size_t per_client = 150;
  std::size_t clients = 4;
  std::size_t test_samples = 300;
  double spread = 2.0;  // std-dev of the class centres
  std::uint64_t seed = 1;
};

// Gaussian blobs (unit variance around seeded class centres), split IID into
// `clients` shards of `per_client` samples, plus a held-out test set drawn
// from the same distribution. Deterministic in the seed.
FederatedData make_synthetic(const SyntheticSpec& spec);

// Seeded shuffle split into `clients` disjoint shards covering every sample.
// Shard sizes differ by at most one. Client ids are 1..clients.
std::vector<ClientState> partition_iid(const Dataset& data, std::size_t clients,
                                       std::uint64_t seed);

// Materializes the configured dataset. IDX inputs must match the first
// layer size and labels must be below the last one.
FederatedData load_federated_data(const RunConfig& config);

}  // namespace sifl

#endif  // SIFL_DATASETS_H_
