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

#ifndef SIFL_MODEL_H_
#define SIFL_MODEL_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "sifl/matrix.h"
#include "sifl/vectors.h"

namespace sifl {

struct LayerShape {
  std::size_t fan_in;
  std::size_t fan_out;
  std::size_t weight_offset;  // into the flat parameter vector
  std::size_t bias_offset;
};

// Fully connected network: ReLU on hidden layers, softmax on the output.
//
// Flat parameter layout is layer-major; within a layer the weight matrix
// (fan_out x fan_in, row-major, one row per output unit) comes first,
// followed by the fan_out biases.
class ModelSpec {
 public:
  // Throws InvalidArgument unless there are >= 3 sizes (at least one hidden
  // layer) and every size is >= 1.
  explicit ModelSpec(std::vector<std::size_t> layer_sizes);

  std::span<const std::size_t> layer_sizes() const { return sizes_; }
  std::size_t input_dim() const { return sizes_.front(); }
  std::size_t output_dim() const { return sizes_.back(); }
  std::size_t layer_count() const { return layers_.size(); }
  const LayerShape& layer(std::size_t l) const { return layers_[l]; }
  std::size_t param_count() const { return param_count_; }

  friend bool operator==(const ModelSpec& a, const ModelSpec& b) {
    return a.sizes_ == b.sizes_;
  }

 private:
  std::vector<std::size_t> sizes_;
  std::vector<LayerShape> layers_;
  std::size_t param_count_ = 0;
};

struct LayerParams {
  Matrix weights;  // fan_out x fan_in
  std::vector<double> bias;
};

ParamVector flatten(const ModelSpec& spec, std::span<const LayerParams> layers);
// Throws DimensionError if w.size() != spec.param_count().
std::vector<LayerParams> unflatten(const ModelSpec& spec, const ParamVector& w);

// Glorot-uniform weights, U(-sqrt(6/(fan_in+fan_out)), +sqrt(...)), zero biases.
ParamVector init_params(const ModelSpec& spec, std::uint64_t seed);

// Labelled samples; inputs are row-major, one row per sample.
struct Dataset {
  std::size_t features = 0;
  std::vector<double> inputs;
  std::vector<std::uint32_t> labels;

  std::size_t size() const { return labels.size(); }
  std::span<const double> sample(std::size_t i) const {
    return {inputs.data() + i * features, features};
  }
};

struct MiniBatch {
  Matrix inputs;  // batch x input_dim
  std::vector<std::uint32_t> labels;

  std::size_t size() const { return labels.size(); }
};

MiniBatch make_batch(const Dataset& data, std::span<const std::size_t> indices);
// Whole dataset as one batch.
MiniBatch make_batch(const Dataset& data);

}  // namespace sifl

#endif  // SIFL_MODEL_H_
