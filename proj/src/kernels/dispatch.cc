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

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <string>

#include "internal.h"
#include "sifl/error.h"
#include "sifl/kernels.h"

namespace sifl::kernels {
namespace {

Isa detect_best() {
#if defined(SIFL_HAVE_AVX2)
  if (isa_supported(Isa::kAvx2)) return Isa::kAvx2;
#endif
#if defined(SIFL_HAVE_NEON)
  return Isa::kNeon;
#endif
  return Isa::kScalar;
}

Isa initial_isa() {
  if (const char* env = std::getenv("SIFL_KERNELS"); env != nullptr && *env) {
    const Isa requested = parse_isa(env);
    if (isa_supported(requested)) return requested;
  }
  return detect_best();
}

std::atomic<Isa>& current() {
  static std::atomic<Isa> isa{initial_isa()};
  return isa;
}

void require(bool ok, const char* what) {
  if (!ok) throw DimensionError(what);
}

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return "scalar";
    case Isa::kAvx2:
      return "avx2";
    case Isa::kNeon:
      return "neon";
  }
  return "unknown";
}

Isa parse_isa(std::string_view name) {
  if (name == "scalar") return Isa::kScalar;
  if (name == "avx2") return Isa::kAvx2;
  if (name == "neon") return Isa::kNeon;
  throw InvalidArgument("unknown kernel ISA '" + std::string(name) + "'");
}

bool isa_supported(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return true;
    case Isa::kAvx2:
#if defined(SIFL_HAVE_AVX2)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Isa::kNeon:
#if defined(SIFL_HAVE_NEON)
      return true;
#else
      return false;
#endif
  }
  return false;
}

Isa active_isa() { return current().load(std::memory_order_relaxed); }

void set_active_isa(Isa isa) {
  if (!isa_supported(isa)) {
    throw InvalidArgument("kernel ISA '" + std::string(isa_name(isa)) +
                          "' is not supported on this machine");
  }
  current().store(isa, std::memory_order_relaxed);
}

const KernelTable& table(Isa isa) {
  if (!isa_supported(isa)) {
    throw InvalidArgument("kernel ISA '" + std::string(isa_name(isa)) +
                          "' is not supported on this machine");
  }
  switch (isa) {
#if defined(SIFL_HAVE_AVX2)
    case Isa::kAvx2:
      return internal::avx2_table();
#endif
#if defined(SIFL_HAVE_NEON)
    case Isa::kNeon:
      return internal::neon_table();
#endif
    default:
      return internal::scalar_table();
  }
}

const KernelTable& active_table() { return table(active_isa()); }

double dot(std::span<const double> x, std::span<const double> y) {
  require(x.size() == y.size(), "dot: length mismatch");
  return active_table().dot(x.data(), y.data(), x.size());
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  require(x.size() == y.size(), "axpy: length mismatch");
  active_table().axpy(alpha, x.data(), y.data(), x.size());
}

void scale(double alpha, std::span<double> x) {
  active_table().scale(alpha, x.data(), x.size());
}

void gemv(double alpha, ConstMatrixView a, std::span<const double> x,
          double beta, std::span<double> y) {
  require(x.size() == a.cols, "gemv: x length != matrix columns");
  require(y.size() == a.rows, "gemv: y length != matrix rows");
  active_table().gemv(alpha, a.data, a.rows, a.cols, x.data(), beta, y.data());
}

double norm2(std::span<const double> x) { return std::sqrt(dot(x, x)); }

}  // namespace sifl::kernels
