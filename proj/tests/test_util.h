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

#ifndef SIFL_TESTS_TEST_UTIL_H_
#define SIFL_TESTS_TEST_UTIL_H_

// Reference arithmetic written independently of the library kernels.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "sifl/immersion_keys.h"
#include "sifl/matrix.h"
#include "sifl/model.h"

namespace sifl::testing {

// C = A B by the textbook triple loop.
inline Matrix naive_matmul(const Matrix& a, const Matrix& b) {
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < b.cols(); ++j) {
      long double s = 0;
      for (std::size_t k = 0; k < a.cols(); ++k) {
        s += static_cast<long double>(a(i, k)) * b(k, j);
      }
      c(i, j) = static_cast<double>(s);
    }
  }
  return c;
}

inline std::vector<double> naive_matvec(const Matrix& a, const std::vector<double>& x) {
  std::vector<double> y(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    long double s = 0;
    for (std::size_t k = 0; k < a.cols(); ++k) s += static_cast<long double>(a(i, k)) * x[k];
    y[i] = static_cast<double>(s);
  }
  return y;
}

// Induced infinity norm of (A - c I), c applied on the diagonal only.
inline double inf_norm_minus_identity(const Matrix& a, double c) {
  double worst = 0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double row = 0;
    for (std::size_t j = 0; j < a.cols(); ++j) {
      row += std::abs(a(i, j) - (i == j ? c : 0.0));
    }
    worst = std::max(worst, row);
  }
  return worst;
}

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

inline double euclid(const std::vector<double>& v) {
  long double s = 0;
  for (double x : v) s += static_cast<long double>(x) * x;
  return std::sqrt(static_cast<double>(s));
}

inline std::vector<double> gaussian_vector(std::size_t n, std::mt19937_64& rng,
                                           double sd = 1.0) {
  std::normal_distribution<double> d(0.0, sd);
  std::vector<double> v(n);
  for (double& x : v) x = d(rng);
  return v;
}

// Random labelled dataset with `features` inputs and `classes` labels.
inline Dataset random_dataset(std::size_t samples, std::size_t features,
                              std::size_t classes, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Dataset d;
  d.features = features;
  d.inputs = gaussian_vector(samples * features, rng);
  for (std::size_t i = 0; i < samples; ++i) {
    d.labels.push_back(static_cast<std::uint32_t>(rng() % classes));
  }
  return d;
}

// The 1x2 example key: M = [2, 1], G = [0.4; 0.2], N = [1; -2].
inline KeySet example_keyset() {
  return KeySet({ImmersionKey::from_matrices(Matrix(1, 2, {2.0, 1.0}),
                                             Matrix(2, 1, {0.4, 0.2}),
                                             Matrix(2, 1, {1.0, -2.0}))});
}

}  // namespace sifl::testing

#endif  // SIFL_TESTS_TEST_UTIL_H_
