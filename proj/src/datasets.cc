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

#include "sifl/datasets.h"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <numeric>
#include <random>
#include <string>

#include "sifl/error.h"
#include "sifl/rng.h"

namespace sifl {
namespace {

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw DatasetError("cannot open " + path.string(), DatasetError::Kind::kIo);
  }
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::uint32_t be32(const std::vector<std::uint8_t>& b, std::size_t at) {
  return std::uint32_t{b[at]} << 24 | std::uint32_t{b[at + 1]} << 16 |
         std::uint32_t{b[at + 2]} << 8 | std::uint32_t{b[at + 3]};
}

struct IdxFile {
  std::vector<std::uint8_t> bytes;
  std::vector<std::uint32_t> dims;
  std::size_t body = 0;  // offset of the first data byte
};

IdxFile parse_idx(const std::filesystem::path& path, std::uint32_t magic,
                  std::size_t rank) {
  IdxFile f;
  f.bytes = read_file(path);
  const std::string name = path.string();
  if (f.bytes.size() < 4) {
    throw DatasetError(name + ": truncated header", DatasetError::Kind::kTruncated);
  }
  const std::uint32_t found = be32(f.bytes, 0);
  if (found != magic) {
    char buf[96];
    std::snprintf(buf, sizeof buf, ": magic 0x%08x, expected 0x%08x", found, magic);
    throw DatasetError(name + buf, DatasetError::Kind::kMagicMismatch);
  }
  f.body = 4 + 4 * rank;
  if (f.bytes.size() < f.body) {
    throw DatasetError(name + ": truncated header", DatasetError::Kind::kTruncated);
  }
  std::size_t expected = 1;
  for (std::size_t d = 0; d < rank; ++d) {
    f.dims.push_back(be32(f.bytes, 4 + 4 * d));
    expected *= f.dims.back();
  }
  if (f.bytes.size() - f.body < expected) {
    throw DatasetError(name + ": truncated data: " +
                           std::to_string(f.bytes.size() - f.body) + " of " +
                           std::to_string(expected) + " bytes",
                       DatasetError::Kind::kTruncated);
  }
  if (f.bytes.size() - f.body > expected) {
    throw DatasetError(name + ": trailing bytes after data", DatasetError::Kind::kFormat);
  }
  return f;
}

}  // namespace

Dataset load_idx_dataset(const std::filesystem::path& images,
                         const std::filesystem::path& labels, std::size_t limit) {
  const IdxFile img = parse_idx(images, kIdxImageMagic, 3);
  const IdxFile lab = parse_idx(labels, kIdxLabelMagic, 1);
  const std::size_t count = img.dims[0];
  if (lab.dims[0] != count) {
    throw DatasetError("image count " + std::to_string(count) +
                           " does not match label count " + std::to_string(lab.dims[0]),
                       DatasetError::Kind::kCountMismatch);
  }
  const std::size_t n = limit > 0 ? std::min(limit, count) : count;
  Dataset d;
  d.features = std::size_t{img.dims[1]} * img.dims[2];
  if (d.features == 0) {
    throw DatasetError(images.string() + ": zero-sized images", DatasetError::Kind::kFormat);
  }
  d.inputs.resize(n * d.features);
  for (std::size_t i = 0; i < d.inputs.size(); ++i) {
    d.inputs[i] = img.bytes[img.body + i] / 255.0;
  }
  d.labels.assign(lab.bytes.begin() + lab.body, lab.bytes.begin() + lab.body + n);
  return d;
}

std::vector<ClientState> partition_iid(const Dataset& data, std::size_t clients,
                                       std::uint64_t seed) {
  if (clients < 1 || clients > 65535) {
    throw InvalidArgument("partition_iid: clients must be in [1, 65535]");
  }
  if (data.size() < clients) {
    throw InvalidArgument("partition_iid: fewer samples (" + std::to_string(data.size()) +
                          ") than clients (" + std::to_string(clients) + ")");
  }
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  // Explicit Fisher-Yates: std::shuffle's sequence is library-specific.
  for (std::size_t i = order.size(); i > 1; --i) {
    std::swap(order[i - 1], order[rng() % i]);
  }

  std::vector<ClientState> out;
  const std::size_t base = data.size() / clients;
  const std::size_t extra = data.size() % clients;
  std::size_t next = 0;
  for (std::size_t c = 0; c < clients; ++c) {
    const std::size_t take = base + (c < extra ? 1 : 0);
    ClientState s;
    s.id = static_cast<std::uint16_t>(c + 1);
    s.data.features = data.features;
    s.data.inputs.reserve(take * data.features);
    for (std::size_t k = 0; k < take; ++k) {
      const std::size_t i = order[next++];
      const auto x = data.sample(i);
      s.data.inputs.insert(s.data.inputs.end(), x.begin(), x.end());
      s.data.labels.push_back(data.labels[i]);
    }
    out.push_back(std::move(s));
  }
  return out;
}

FederatedData make_synthetic(const SyntheticSpec& spec) {
  if (spec.features < 1 || spec.classes < 1 || spec.per_client < 1 ||
      spec.clients < 1 || spec.test_samples < 1) {
    throw InvalidArgument("make_synthetic: counts must be >= 1");
  }
  Rng centre_rng(derive_seed(spec.seed, {kDataStream, 0}));
  std::normal_distribution<double> centre(0.0, spec.spread);
  std::vector<double> centres(spec.classes * spec.features);
  for (double& c : centres) c = centre(centre_rng);

  auto draw = [&](std::size_t count, std::uint64_t stream) {
    Rng rng(derive_seed(spec.seed, {kDataStream, stream}));
    std::normal_distribution<double> noise(0.0, 1.0);
    Dataset d;
    d.features = spec.features;
    d.inputs.reserve(count * spec.features);
    for (std::size_t i = 0; i < count; ++i) {
      const auto label = static_cast<std::uint32_t>(rng() % spec.classes);
      for (std::size_t f = 0; f < spec.features; ++f) {
        d.inputs.push_back(centres[label * spec.features + f] + noise(rng));
      }
      d.labels.push_back(label);
    }
    return d;
  };

  FederatedData out;
  const Dataset pool = draw(spec.per_client * spec.clients, 1);
  out.clients = partition_iid(pool, spec.clients,
                              derive_seed(spec.seed, {kPartitionStream}));
  out.test = draw(spec.test_samples, 2);
  return out;
}

FederatedData load_federated_data(const RunConfig& config) {
  const std::size_t inputs = config.layers.front();
  const std::size_t classes = config.layers.back();
  const DatasetSource& src = config.dataset;
  if (src.kind == DatasetSource::Kind::kSynthetic) {
    return make_synthetic({inputs, classes, src.per_client, config.clients,
                           src.test_samples, src.spread, config.seed});
  }
  Dataset train = load_idx_dataset(src.train_images, src.train_labels, src.train_limit);
  Dataset test = load_idx_dataset(src.test_images, src.test_labels, src.test_limit);
  for (const Dataset* d : {&train, &test}) {
    if (d->features != inputs) {
      throw ConfigError("layers: input size " + std::to_string(inputs) +
                            " does not match dataset feature count " +
                            std::to_string(d->features),
                        0, "layers");
    }
    for (std::uint32_t label : d->labels) {
      if (label >= classes) {
        throw ConfigError("layers: label " + std::to_string(label) +
                              " out of range for " + std::to_string(classes) +
                              " outputs",
                          0, "layers");
      }
    }
  }
  FederatedData out;
  out.clients = partition_iid(train, config.clients,
                              derive_seed(config.seed, {kPartitionStream}));
  out.test = std::move(test);
  return out;
}

}  // namespace sifl
