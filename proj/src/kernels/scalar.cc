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

// Reference implementations. Plain sequential loops, one accumulator.

#include <cstddef>

#include "internal.h"

namespace sifl::kernels::internal {
namespace {

double dot_scalar(const double* x, const double* y, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void scale_scalar(double alpha, double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= alpha;
}

void gemv_scalar(double alpha, const double* a, std::size_t rows,
                 std::size_t cols, const double* x, double beta, double* y) {
  for (std::size_t i = 0; i < rows; ++i) {
    const double ax = dot_scalar(a + i * cols, x, cols);
    y[i] = beta == 0.0 ? alpha * ax : alpha * ax + beta * y[i];
  }
}

constexpr KernelTable kScalar{dot_scalar, axpy_scalar, scale_scalar,
                              gemv_scalar};

}  // namespace

const KernelTable& scalar_table() { return kScalar; }

}  // namespace sifl::kernels::internal
