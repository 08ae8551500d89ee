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

#include "sifl/model.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <utility>

#include "sifl/error.h"
#include "sifl/rng.h"

namespace sifl {

ModelSpec::ModelSpec(std::vector<std::size_t> layer_sizes)
    : sizes_(std::move(layer_sizes)) {
  if (sizes_.size() < 3) {
    throw InvalidArgument("ModelSpec: need input, >= 1 hidden and output layer");
  }
  for (std::size_t s : sizes_) {
    if (s == 0) throw InvalidArgument("ModelSpec: layer sizes must be >= 1");
  }
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    const std::size_t fan_in = sizes_[l];
    const std::size_t fan_out = sizes_[l + 1];
    layers_.push_back(
        {fan_in, fan_out, param_count_, param_count_ + fan_in * fan_out});
    param_count_ += fan_in * fan_out + fan_out;
  }
}

ParamVector flatten(const ModelSpec& spec, std::span<const LayerParams> layers) {
  if (layers.size() != spec.layer_count()) {
    throw DimensionError("flatten: expected " + std::to_string(spec.layer_count()) +
                         " layers, got " + std::to_string(layers.size()));
  }
  ParamVector w;
  w.values.reserve(spec.param_count());
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const LayerShape& shape = spec.layer(l);
    const LayerParams& p = layers[l];
    if (p.weights.rows() != shape.fan_out || p.weights.cols() != shape.fan_in ||
        p.bias.size() != shape.fan_out) {
      throw DimensionError("flatten: layer " + std::to_string(l) +
                           " has the wrong shape");
    }
    w.values.insert(w.values.end(), p.weights.data().begin(),
                    p.weights.data().end());
    w.values.insert(w.values.end(), p.bias.begin(), p.bias.end());
  }
  return w;
}

std::vector<LayerParams> unflatten(const ModelSpec& spec, const ParamVector& w) {
  if (w.size() != spec.param_count()) {
    throw DimensionError("unflatten: expected " +
                         std::to_string(spec.param_count()) +
                         " parameters, got " + std::to_string(w.size()));
  }
  std::vector<LayerParams> layers;
  for (std::size_t l = 0; l < spec.layer_count(); ++l) {
    const LayerShape& s = spec.layer(l);
    auto first = w.values.begin() + static_cast<std::ptrdiff_t>(s.weight_offset);
    auto bias = w.values.begin() + static_cast<std::ptrdiff_t>(s.bias_offset);
    layers.push_back(
        {Matrix(s.fan_out, s.fan_in, std::vector<double>(first, bias)),
         std::vector<double>(bias, bias + static_cast<std::ptrdiff_t>(s.fan_out))});
  }
  return layers;
}

ParamVector init_params(const ModelSpec& spec, std::uint64_t seed) {
  ParamVector w{std::vector<double>(spec.param_count(), 0.0)};
  Rng rng(derive_seed(seed, {kInitStream}));
  for (std::size_t l = 0; l < spec.layer_count(); ++l) {
    const LayerShape& s = spec.layer(l);
    const double limit =
        std::sqrt(6.0 / static_cast<double>(s.fan_in + s.fan_out));
    std::uniform_real_distribution<double> u(-limit, limit);
    for (std::size_t i = 0; i < s.fan_in * s.fan_out; ++i) {
      w.values[s.weight_offset + i] = u(rng);
    }
  }
  return w;
}

MiniBatch make_batch(const Dataset& data, std::span<const std::size_t> indices) {
  MiniBatch batch{Matrix(indices.size(), data.features), {}};
  batch.labels.reserve(indices.size());
  for (std::size_t r = 0; r < indices.size(); ++r) {
    const auto src = data.sample(indices[r]);
    std::copy(src.begin(), src.end(), batch.inputs.row(r).begin());
    batch.labels.push_back(data.labels[indices[r]]);
  }
  return batch;
}

MiniBatch make_batch(const Dataset& data) {
  return MiniBatch{Matrix(data.size(), data.features, data.inputs), data.labels};
}

}  // namespace sifl
