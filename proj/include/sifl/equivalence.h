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

#ifndef SIFL_EQUIVALENCE_H_
#define SIFL_EQUIVALENCE_H_

// Plain vs. encrypted trajectory comparison.
//
// Per round: ||w_plain - w_dec||_2 / (1 + ||w_plain||_2), where w_dec is the
// decrypted aggregate. The run passes iff the maximum is <= threshold.

#include <cstddef>
#include <string>
#include <vector>

#include "sifl/immersion_keys.h"
#include "sifl/vectors.h"

namespace sifl {

inline constexpr double kDefaultEquivalenceThreshold = 1e-6;

struct EquivalenceReport {
  std::vector<double> errors;  // one per round
  double max_error = 0.0;
  std::size_t worst_round = 0;  // index of max_error
  double threshold = kDefaultEquivalenceThreshold;
  bool passed = true;

  // Rounds whose error exceeds the threshold.
  std::vector<std::size_t> failing_rounds() const;
  // Machine-readable summary (JSON object).
  std::string to_json() const;
};

// Throws InvalidArgument on length or dimension mismatch.
EquivalenceReport check_equivalence(const std::vector<ParamVector>& plain,
                                    const std::vector<EncryptedParamVector>& sifl,
                                    const KeySet& keys,
                                    double threshold = kDefaultEquivalenceThreshold);

// Both traces already in plaintext coordinates.
EquivalenceReport check_equivalence(const std::vector<ParamVector>& plain,
                                    const std::vector<ParamVector>& decrypted,
                                    double threshold = kDefaultEquivalenceThreshold);

}  // namespace sifl

#endif  // SIFL_EQUIVALENCE_H_
