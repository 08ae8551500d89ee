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

#ifndef SIFL_LEARNER_H_
#define SIFL_LEARNER_H_

// Loss, gradient and the two SGD dynamics.
//
// The plain step is w <- w - lr * grad l(w). The target (immersed) step runs
// in encrypted coordinates,
//
//   v <- v - lr * G grad l(M v),
//
// which commutes with encryption: step(encrypt(w)) == encrypt(step(w)). Every
// update lies in range(G), so the kernel component (I - GM) v is untouched.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>

#include "sifl/immersion_keys.h"
#include "sifl/matrix.h"
#include "sifl/model.h"
#include "sifl/vectors.h"

namespace sifl {

struct Hyperparams {
  double learning_rate = 0.01;
  std::size_t local_epochs = 2;  // K
  std::size_t rounds = 30;       // T
  std::size_t batch_size = 32;

  // Throws InvalidArgument naming the offending field.
  void validate() const;
};

struct ForwardResult {
  Matrix probabilities;  // batch x classes
  double loss = 0.0;     // mean cross-entropy
};

// Throws DimensionError on shape mismatch, InvalidArgument on a label outside
// the output range and NumericError (1-based layer index) on NaN/Inf.
ForwardResult forward(const ModelSpec& spec, std::span<const double> w,
                      const MiniBatch& batch);

// Writes the gradient of the mean cross-entropy into `grad` (overwritten) and
// returns the loss.
double gradient(const ModelSpec& spec, std::span<const double> w,
                const MiniBatch& batch, std::span<double> grad);
ParamVector gradient(const ModelSpec& spec, const ParamVector& w,
                     const MiniBatch& batch);

// Loss-and-gradient callback in plain coordinates: returns l(w), writes
// grad l(w) into the second argument.
using Objective =
    std::function<double(std::span<const double>, std::span<double>)>;

Objective batch_objective(const ModelSpec& spec, const MiniBatch& batch);

ParamVector plain_sgd_step(const ParamVector& w, const Objective& objective,
                           double learning_rate);
EncryptedParamVector encrypted_sgd_step(const KeySet& keys,
                                        const EncryptedParamVector& v,
                                        const Objective& objective,
                                        double learning_rate);

ParamVector plain_sgd_step(const ModelSpec& spec, const ParamVector& w,
                           const MiniBatch& batch, double learning_rate);
EncryptedParamVector encrypted_sgd_step(const ModelSpec& spec,
                                        const KeySet& keys,
                                        const EncryptedParamVector& v,
                                        const MiniBatch& batch,
                                        double learning_rate);

template <typename Params>
struct ClientResult {
  Params params;
  double train_loss = 0.0;  // sample-weighted mean batch loss, last epoch
  std::size_t steps = 0;
};

// Sample order for one local epoch: a permutation of [0, n) that depends only
// on (shuffle_seed, epoch).
std::vector<std::size_t> epoch_order(std::size_t n, std::uint64_t shuffle_seed,
                                     std::size_t epoch);

// K epochs of mini-batch SGD over `data`, reshuffled each epoch; the last
// short batch is kept. Throws InvalidArgument on an empty dataset.
ClientResult<ParamVector> client_update(const ModelSpec& spec,
                                        const ParamVector& init,
                                        const Dataset& data,
                                        const Hyperparams& hyper,
                                        std::uint64_t shuffle_seed);
// Encrypted counterpart: identical batches, target SGD steps.
ClientResult<EncryptedParamVector> client_update(
    const ModelSpec& spec, const KeySet& keys, const EncryptedParamVector& init,
    const Dataset& data, const Hyperparams& hyper, std::uint64_t shuffle_seed);

struct Evaluation {
  double loss = 0.0;
  double accuracy = 0.0;  // fraction of argmax hits, in [0, 1]
};

Evaluation evaluate(const ModelSpec& spec, std::span<const double> w,
                    const Dataset& data);

}  // namespace sifl

#endif  // SIFL_LEARNER_H_
