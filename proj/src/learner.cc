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

#include "sifl/learner.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "sifl/error.h"
#include "sifl/kernels.h"
#include "sifl/rng.h"

namespace sifl {
namespace {

ConstMatrixView weights_of(const ModelSpec& spec, std::span<const double> w,
                           std::size_t l) {
  const LayerShape& s = spec.layer(l);
  return {w.data() + s.weight_offset, s.fan_out, s.fan_in};
}

std::span<const double> bias_of(const ModelSpec& spec, std::span<const double> w,
                                std::size_t l) {
  const LayerShape& s = spec.layer(l);
  return w.subspan(s.bias_offset, s.fan_out);
}

void check_inputs(const ModelSpec& spec, std::span<const double> w,
                  const MiniBatch& batch) {
  if (w.size() != spec.param_count()) {
    throw DimensionError("parameter vector has " + std::to_string(w.size()) +
                         " entries, model needs " +
                         std::to_string(spec.param_count()));
  }
  if (batch.size() == 0) throw InvalidArgument("empty mini-batch");
  if (batch.inputs.cols() != spec.input_dim() ||
      batch.inputs.rows() != batch.size()) {
    throw DimensionError("mini-batch inputs are " +
                         std::to_string(batch.inputs.rows()) + "x" +
                         std::to_string(batch.inputs.cols()) +
                         ", model input dimension is " +
                         std::to_string(spec.input_dim()));
  }
  for (std::uint32_t y : batch.labels) {
    if (y >= spec.output_dim()) {
      throw InvalidArgument("label " + std::to_string(y) +
                            " outside the output range");
    }
  }
}

void check_finite(std::span<const double> z, std::size_t layer) {
  for (double v : z) {
    if (!std::isfinite(v)) {
      throw NumericError("non-finite activation in layer " + std::to_string(layer),
                         layer);
    }
  }
}

// Activations of one sample: acts[0] is the input, acts[l] the post-ReLU
// output of hidden layer l, acts.back() the logits.
struct Activations {
  std::vector<std::vector<double>> acts;
};

void run_layers(const ModelSpec& spec, std::span<const double> w,
                std::span<const double> x, Activations& a) {
  const std::size_t layers = spec.layer_count();
  a.acts.resize(layers + 1);
  a.acts[0].assign(x.begin(), x.end());
  for (std::size_t l = 0; l < layers; ++l) {
    const LayerShape& s = spec.layer(l);
    auto& z = a.acts[l + 1];
    z.assign(bias_of(spec, w, l).begin(), bias_of(spec, w, l).end());
    kernels::gemv(1.0, weights_of(spec, w, l), a.acts[l], 1.0, z);
    check_finite(z, l + 1);
    if (l + 1 < layers) {
      for (std::size_t j = 0; j < s.fan_out; ++j) z[j] = std::max(z[j], 0.0);
    }
  }
}

// Softmax into `p` and the cross-entropy -log p[label] via log-sum-exp.
double softmax_xent(std::span<const double> logits, std::uint32_t label,
                    std::span<double> p) {
  const double zmax = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (std::size_t k = 0; k < logits.size(); ++k) {
    p[k] = std::exp(logits[k] - zmax);
    sum += p[k];
  }
  for (double& v : p) v /= sum;
  return std::log(sum) + zmax - logits[label];
}

}  // namespace

void Hyperparams::validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw InvalidArgument("lr: learning rate must be > 0");
  }
  if (local_epochs < 1) throw InvalidArgument("local_epochs: must be >= 1");
  if (rounds < 1) throw InvalidArgument("rounds: must be >= 1");
  if (batch_size < 1) throw InvalidArgument("batch_size: must be >= 1");
}

ForwardResult forward(const ModelSpec& spec, std::span<const double> w,
                      const MiniBatch& batch) {
  check_inputs(spec, w, batch);
  ForwardResult out{Matrix(batch.size(), spec.output_dim()), 0.0};
  Activations a;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    run_layers(spec, w, batch.inputs.row(i), a);
    out.loss += softmax_xent(a.acts.back(), batch.labels[i],
                             out.probabilities.row(i));
  }
  out.loss /= static_cast<double>(batch.size());
  return out;
}

double gradient(const ModelSpec& spec, std::span<const double> w,
                const MiniBatch& batch, std::span<double> grad) {
  check_inputs(spec, w, batch);
  if (grad.size() != w.size()) {
    throw DimensionError("gradient buffer has the wrong length");
  }
  std::fill(grad.begin(), grad.end(), 0.0);
  const std::size_t layers = spec.layer_count();
  const double inv_batch = 1.0 / static_cast<double>(batch.size());
  Activations a;
  std::vector<double> delta, delta_prev;
  double loss = 0.0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    run_layers(spec, w, batch.inputs.row(i), a);
    delta.resize(spec.output_dim());
    loss += softmax_xent(a.acts.back(), batch.labels[i], delta);
    delta[batch.labels[i]] -= 1.0;
    kernels::scale(inv_batch, delta);

    for (std::size_t l = layers; l-- > 0;) {
      const LayerShape& s = spec.layer(l);
      const auto& input = a.acts[l];
      for (std::size_t j = 0; j < s.fan_out; ++j) {
        if (delta[j] == 0.0) continue;
        kernels::axpy(delta[j], input,
                      grad.subspan(s.weight_offset + j * s.fan_in, s.fan_in));
        grad[s.bias_offset + j] += delta[j];
      }
      if (l == 0) break;
      // Back through W^T and the ReLU of the previous layer.
      delta_prev.assign(s.fan_in, 0.0);
      const ConstMatrixView wl = weights_of(spec, w, l);
      for (std::size_t j = 0; j < s.fan_out; ++j) {
        if (delta[j] != 0.0) kernels::axpy(delta[j], wl.row(j), delta_prev);
      }
      for (std::size_t k = 0; k < s.fan_in; ++k) {
        if (!(input[k] > 0.0)) delta_prev[k] = 0.0;
      }
      delta.swap(delta_prev);
    }
  }
  return loss * inv_batch;
}

ParamVector gradient(const ModelSpec& spec, const ParamVector& w,
                     const MiniBatch& batch) {
  ParamVector g{std::vector<double>(w.size())};
  gradient(spec, w.values, batch, g.values);
  return g;
}

namespace {

// lr == 0 is allowed for single steps (a no-op); training requires lr > 0.
void check_step_size(double learning_rate) {
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
    throw InvalidArgument("lr: learning rate must be finite and >= 0");
  }
}

}  // namespace

Objective batch_objective(const ModelSpec& spec, const MiniBatch& batch) {
  return [&spec, &batch](std::span<const double> w, std::span<double> g) {
    return gradient(spec, w, batch, g);
  };
}

ParamVector plain_sgd_step(const ParamVector& w, const Objective& objective,
                           double learning_rate) {
  check_step_size(learning_rate);
  std::vector<double> g(w.size());
  objective(w.values, g);
  ParamVector next = w;
  kernels::axpy(-learning_rate, g, next.values);
  return next;
}

EncryptedParamVector encrypted_sgd_step(const KeySet& keys,
                                        const EncryptedParamVector& v,
                                        const Objective& objective,
                                        double learning_rate) {
  check_step_size(learning_rate);
  if (v.size() != keys.immersed_dim()) {
    throw DimensionError("encrypted_sgd_step: vector has " +
                         std::to_string(v.size()) + " entries, keys expect " +
                         std::to_string(keys.immersed_dim()));
  }
  std::vector<double> plain(keys.plain_dim());
  decrypt_into(keys, v.values, plain);
  std::vector<double> g(keys.plain_dim());
  objective(plain, g);
  EncryptedParamVector next = v;
  add_encoded(keys, -learning_rate, g, next.values);
  return next;
}

ParamVector plain_sgd_step(const ModelSpec& spec, const ParamVector& w,
                           const MiniBatch& batch, double learning_rate) {
  return plain_sgd_step(w, batch_objective(spec, batch), learning_rate);
}

EncryptedParamVector encrypted_sgd_step(const ModelSpec& spec,
                                        const KeySet& keys,
                                        const EncryptedParamVector& v,
                                        const MiniBatch& batch,
                                        double learning_rate) {
  return encrypted_sgd_step(keys, v, batch_objective(spec, batch), learning_rate);
}

std::vector<std::size_t> epoch_order(std::size_t n, std::uint64_t shuffle_seed,
                                     std::size_t epoch) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(derive_seed(shuffle_seed, {kShuffleStream, epoch}));
  // Fisher-Yates with our own index draw: std::shuffle's use of the engine is
  // implementation-defined.
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(order[i - 1], order[j]);
  }
  return order;
}

namespace {

// Shared epoch/batch loop; `step` advances the state on one batch and
// returns that batch's loss.
template <typename Params, typename Step>
ClientResult<Params> run_local_epochs(Params state, const Dataset& data,
                                      const Hyperparams& hyper,
                                      std::uint64_t shuffle_seed, Step step) {
  if (data.size() == 0) throw InvalidArgument("client_update: empty dataset");
  hyper.validate();
  ClientResult<Params> result{std::move(state), 0.0, 0};
  for (std::size_t epoch = 0; epoch < hyper.local_epochs; ++epoch) {
    const auto order = epoch_order(data.size(), shuffle_seed, epoch);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += hyper.batch_size) {
      const std::size_t len = std::min(hyper.batch_size, order.size() - start);
      const MiniBatch batch =
          make_batch(data, std::span(order).subspan(start, len));
      epoch_loss += step(result.params, batch) * static_cast<double>(len);
      ++result.steps;
    }
    result.train_loss = epoch_loss / static_cast<double>(data.size());
  }
  return result;
}

}  // namespace

ClientResult<ParamVector> client_update(const ModelSpec& spec,
                                        const ParamVector& init,
                                        const Dataset& data,
                                        const Hyperparams& hyper,
                                        std::uint64_t shuffle_seed) {
  if (init.size() != spec.param_count()) {
    throw DimensionError("client_update: initial parameters have wrong length");
  }
  std::vector<double> g(spec.param_count());
  return run_local_epochs(
      init, data, hyper, shuffle_seed,
      [&](ParamVector& w, const MiniBatch& batch) {
        const double loss = gradient(spec, w.values, batch, g);
        kernels::axpy(-hyper.learning_rate, g, w.values);
        return loss;
      });
}

ClientResult<EncryptedParamVector> client_update(
    const ModelSpec& spec, const KeySet& keys, const EncryptedParamVector& init,
    const Dataset& data, const Hyperparams& hyper, std::uint64_t shuffle_seed) {
  if (keys.plain_dim() != spec.param_count()) {
    throw DimensionError("client_update: key set does not cover the model");
  }
  if (init.size() != keys.immersed_dim()) {
    throw DimensionError("client_update: encrypted parameters have wrong length");
  }
  std::vector<double> plain(keys.plain_dim());
  std::vector<double> g(keys.plain_dim());
  return run_local_epochs(
      init, data, hyper, shuffle_seed,
      [&](EncryptedParamVector& v, const MiniBatch& batch) {
        decrypt_into(keys, v.values, plain);
        const double loss = gradient(spec, plain, batch, g);
        add_encoded(keys, -hyper.learning_rate, g, v.values);
        return loss;
      });
}

Evaluation evaluate(const ModelSpec& spec, std::span<const double> w,
                    const Dataset& data) {
  if (data.size() == 0) throw InvalidArgument("evaluate: empty dataset");
  constexpr std::size_t kChunk = 256;
  Evaluation out;
  std::size_t hits = 0;
  std::vector<std::size_t> idx;
  for (std::size_t start = 0; start < data.size(); start += kChunk) {
    const std::size_t len = std::min(kChunk, data.size() - start);
    idx.resize(len);
    std::iota(idx.begin(), idx.end(), start);
    const MiniBatch batch = make_batch(data, idx);
    const ForwardResult f = forward(spec, w, batch);
    out.loss += f.loss * static_cast<double>(len);
    for (std::size_t r = 0; r < len; ++r) {
      const auto row = f.probabilities.row(r);
      const auto best = static_cast<std::size_t>(
          std::max_element(row.begin(), row.end()) - row.begin());
      if (best == batch.labels[r]) ++hits;
    }
  }
  out.loss /= static_cast<double>(data.size());
  out.accuracy = static_cast<double>(hits) / static_cast<double>(data.size());
  return out;
}

}  // namespace sifl
