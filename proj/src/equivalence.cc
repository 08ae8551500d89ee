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

#include "sifl/equivalence.h"

#include <nlohmann/json.hpp>

#include "sifl/error.h"
#include "sifl/federation.h"

namespace sifl {

std::vector<std::size_t> EquivalenceReport::failing_rounds() const {
  std::vector<std::size_t> out;
  for (std::size_t t = 0; t < errors.size(); ++t) {
    if (!(errors[t] <= threshold)) out.push_back(t);
  }
  return out;
}

std::string EquivalenceReport::to_json() const {
  nlohmann::json j;
  j["check"] = "equivalence";
  j["passed"] = passed;
  j["threshold"] = threshold;
  j["rounds"] = errors.size();
  j["max_error"] = max_error;
  j["worst_round"] = worst_round;
  j["failing_rounds"] = failing_rounds();
  return j.dump();
}

EquivalenceReport check_equivalence(const std::vector<ParamVector>& plain,
                                    const std::vector<ParamVector>& decrypted,
                                    double threshold) {
  if (plain.size() != decrypted.size()) {
    throw InvalidArgument("check_equivalence: trace lengths differ (" +
                          std::to_string(plain.size()) + " vs " +
                          std::to_string(decrypted.size()) + ")");
  }
  if (!(threshold >= 0.0)) throw InvalidArgument("check_equivalence: threshold < 0");
  EquivalenceReport r;
  r.threshold = threshold;
  for (std::size_t t = 0; t < plain.size(); ++t) {
    if (plain[t].size() != decrypted[t].size()) {
      throw InvalidArgument("check_equivalence: dimension mismatch in round " +
                            std::to_string(t));
    }
    const double e = relative_error(plain[t].values, decrypted[t].values);
    r.errors.push_back(e);
    // NaN counts as the worst possible error.
    if (!(e <= r.max_error)) {
      r.max_error = e;
      r.worst_round = t;
    }
  }
  r.passed = r.failing_rounds().empty();
  return r;
}

EquivalenceReport check_equivalence(const std::vector<ParamVector>& plain,
                                    const std::vector<EncryptedParamVector>& sifl,
                                    const KeySet& keys, double threshold) {
  std::vector<ParamVector> decrypted;
  decrypted.reserve(sifl.size());
  for (const auto& v : sifl) decrypted.push_back(decrypt(keys, v));
  return check_equivalence(plain, decrypted, threshold);
}

}  // namespace sifl
