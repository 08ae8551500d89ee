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

#ifndef SIFL_CONFIG_H_
#define SIFL_CONFIG_H_

// Run configuration: flat "key = value" text, '#' starts a comment.
//
//   key                   default      meaning
//   mode                  dual         plain | sifl | dual
//   layers                8,16,3       MLP layer sizes, input..output
//   clients               4            number of clients N_c
//   lr                    0.01         learning rate
//   local_epochs          2            local epochs K
//   rounds                30           global rounds T
//   batch_size            32
//   block_max             256          max plain dimension per key block
//   expansion             1            r = m_j - n_j per block
//   seed                  1            root seed (SIFL_SEED overrides)
//   randomness_scale      1.0          std-dev of the kernel randomness
//   dataset               synthetic    synthetic | idx
//   synthetic_per_client  150
//   synthetic_test        300          held-out synthetic samples
//   synthetic_spread      2.0          std-dev of the class centres
//   train_images ...      (idx only)   train_images, train_labels,
//                                      test_images, test_labels
//   train_limit           0            use the first N samples (0 = all)
//   test_limit            0
//   threshold             1e-6         equivalence pass threshold
//   out                   (none)       metrics CSV path
//   verbosity             0            0..2
//
// Relative paths are resolved against the config file's directory.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "sifl/federation.h"

namespace sifl {

struct DatasetSource {
  enum class Kind { kSynthetic, kIdx };
  Kind kind = Kind::kSynthetic;
  std::size_t per_client = 150;
  std::size_t test_samples = 300;
  double spread = 2.0;
  std::filesystem::path train_images, train_labels, test_images, test_labels;
  std::size_t train_limit = 0;
  std::size_t test_limit = 0;
};

struct RunConfig {
  Mode mode = Mode::kDual;
  std::vector<std::size_t> layers{8, 16, 3};
  std::size_t clients = 4;
  double lr = 0.01;
  std::size_t local_epochs = 2;
  std::size_t rounds = 30;
  std::size_t batch_size = 32;
  std::size_t block_max = 256;
  std::size_t expansion = 1;
  std::uint64_t seed = 1;
  double randomness_scale = 1.0;
  DatasetSource dataset;
  double threshold = 1e-6;
  std::filesystem::path output;
  int verbosity = 0;

  // Throws ConfigError naming the offending key.
  void validate() const;
  TrainingConfig training() const;
};

// Throws ConfigError with the line number on syntax errors and unknown keys.
RunConfig parse_config(std::string_view text,
                       const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);

}  // namespace sifl

#endif  // SIFL_CONFIG_H_
