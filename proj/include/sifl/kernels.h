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

#ifndef SIFL_KERNELS_H_
#define SIFL_KERNELS_H_

// Dense double-precision kernels behind every inner loop of the library:
// the immersion maps (gemv), the MLP forward/backward passes (dot, axpy) and
// the aggregation sums (axpy, scale).
//
// Each kernel has a scalar reference implementation and SIMD variants. The
// variant is chosen once at startup from CPUID (x86) or the target (aarch64)
// and can be overridden with SIFL_KERNELS=scalar|avx2|neon or
// set_active_isa(). SIMD variants reassociate sums, so results agree with the
// scalar reference to rounding, not bit-for-bit. Within one process the
// selected variant is fixed, which keeps every run deterministic.

#include <cstddef>
#include <span>
#include <string_view>

#include "sifl/matrix.h"

namespace sifl::kernels {

enum class Isa { kScalar, kAvx2, kNeon };

std::string_view isa_name(Isa isa);
bool isa_supported(Isa isa);
Isa active_isa();
// Throws InvalidArgument when the ISA is not available on this machine.
void set_active_isa(Isa isa);
// Parses "scalar", "avx2" or "neon".
Isa parse_isa(std::string_view name);

struct KernelTable {
  double (*dot)(const double* x, const double* y, std::size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // x *= alpha
  void (*scale)(double alpha, double* x, std::size_t n);
  // y = alpha * A x + beta * y; A is rows x cols row-major. beta == 0 ignores
  // the previous contents of y.
  void (*gemv)(double alpha, const double* a, std::size_t rows,
               std::size_t cols, const double* x, double beta, double* y);
};

// Table for a specific ISA. Throws InvalidArgument if unsupported.
const KernelTable& table(Isa isa);
const KernelTable& active_table();

double dot(std::span<const double> x, std::span<const double> y);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
void scale(double alpha, std::span<double> x);
void gemv(double alpha, ConstMatrixView a, std::span<const double> x,
          double beta, std::span<double> y);

// Euclidean norm via dot.
double norm2(std::span<const double> x);

}  // namespace sifl::kernels

#endif  // SIFL_KERNELS_H_
