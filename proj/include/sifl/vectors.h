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

#ifndef SIFL_VECTORS_H_
#define SIFL_VECTORS_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace sifl {

// Flat model parameters in plain coordinates (R^n).
struct ParamVector {
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
  std::span<double> span() { return values; }
  std::span<const double> span() const { return values; }
  friend bool operator==(const ParamVector&, const ParamVector&) = default;
};

// Flat model parameters in immersed coordinates (R^m), tagged with the global
// round whose kernel randomness they carry.
struct EncryptedParamVector {
  std::vector<double> values;
  std::uint32_t round = 0;

  std::size_t size() const { return values.size(); }
  std::span<double> span() { return values; }
  std::span<const double> span() const { return values; }
  friend bool operator==(const EncryptedParamVector&,
                         const EncryptedParamVector&) = default;
};

// Throws NumericError if any entry is NaN or infinite.
void require_finite(std::span<const double> values, const char* what);

}  // namespace sifl

#endif  // SIFL_VECTORS_H_
