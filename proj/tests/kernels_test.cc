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

#include "sifl/kernels.h"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "sifl/error.h"
#include "test_util.h"

namespace sifl {
namespace {

using kernels::Isa;

std::vector<Isa> supported_simd() {
  std::vector<Isa> out;
  for (Isa isa : {Isa::kAvx2, Isa::kNeon}) {
    if (kernels::isa_supported(isa)) out.push_back(isa);
  }
  return out;
}

// Lengths straddling every unroll boundary of the SIMD variants.
const std::size_t kLengths[] = {0, 1, 2, 3, 4, 5, 7, 8, 9, 15, 16, 17, 31, 33, 64, 257, 1000};

TEST(Kernels, ScalarDotMatchesLongDouble) {
  std::mt19937_64 rng(1);
  for (std::size_t n : kLengths) {
    const auto x = testing::gaussian_vector(n, rng);
    const auto y = testing::gaussian_vector(n, rng);
    long double ref = 0;
    for (std::size_t i = 0; i < n; ++i) ref += static_cast<long double>(x[i]) * y[i];
    EXPECT_NEAR(kernels::table(Isa::kScalar).dot(x.data(), y.data(), n),
                static_cast<double>(ref), 1e-12 * (1 + n));
  }
}

TEST(Kernels, SimdVariantsAgreeWithScalar) {
  std::mt19937_64 rng(2);
  const auto& ref = kernels::table(Isa::kScalar);
  for (Isa isa : supported_simd()) {
    SCOPED_TRACE(std::string(kernels::isa_name(isa)));
    const auto& simd = kernels::table(isa);
    for (std::size_t n : kLengths) {
      const auto x = testing::gaussian_vector(n, rng);
      const auto y = testing::gaussian_vector(n, rng);
      EXPECT_NEAR(simd.dot(x.data(), y.data(), n), ref.dot(x.data(), y.data(), n),
                  1e-12 * (1 + n));

      auto ya = y, yb = y;
      simd.axpy(0.75, x.data(), ya.data(), n);
      ref.axpy(0.75, x.data(), yb.data(), n);
      // Fused multiply-add rounds once instead of twice.
      EXPECT_LE(testing::max_abs_diff(ya, yb), 1e-13);

      auto sa = x, sb = x;
      simd.scale(-1.5, sa.data(), n);
      ref.scale(-1.5, sb.data(), n);
      EXPECT_EQ(sa, sb);
    }
  }
}

TEST(Kernels, SimdGemvAgreesWithScalarAndNaive) {
  std::mt19937_64 rng(3);
  for (std::size_t rows : {1, 2, 3, 4, 5, 9, 17, 64}) {
    for (std::size_t cols : {1, 2, 3, 4, 5, 8, 13, 257}) {
      Matrix a(rows, cols, testing::gaussian_vector(rows * cols, rng));
      const auto x = testing::gaussian_vector(cols, rng);
      const auto y0 = testing::gaussian_vector(rows, rng);
      // Oracle: y = 2 A x - 0.5 y0
      auto expect = testing::naive_matvec(a, x);
      for (std::size_t i = 0; i < rows; ++i) expect[i] = 2.0 * expect[i] - 0.5 * y0[i];
      for (Isa isa : [&] {
             auto v = supported_simd();
             v.push_back(Isa::kScalar);
             return v;
           }()) {
        auto y = y0;
        kernels::table(isa).gemv(2.0, a.data().data(), rows, cols, x.data(), -0.5, y.data());
        EXPECT_LE(testing::max_abs_diff(y, expect), 1e-12 * (1 + cols))
            << kernels::isa_name(isa) << " " << rows << "x" << cols;
      }
    }
  }
}

TEST(Kernels, GemvBetaZeroIgnoresGarbage) {
  Matrix a(2, 2, {1, 2, 3, 4});
  std::vector<double> x{1, 1};
  for (Isa isa : {Isa::kScalar, Isa::kAvx2, Isa::kNeon}) {
    if (!kernels::isa_supported(isa)) continue;
    std::vector<double> y{std::nan(""), std::nan("")};
    kernels::table(isa).gemv(1.0, a.data().data(), 2, 2, x.data(), 0.0, y.data());
    EXPECT_EQ(y, (std::vector<double>{3, 7})) << kernels::isa_name(isa);
  }
}

TEST(Kernels, DispatchCanBeOverridden) {
  const Isa before = kernels::active_isa();
  kernels::set_active_isa(Isa::kScalar);
  EXPECT_EQ(kernels::active_isa(), Isa::kScalar);
  EXPECT_EQ(&kernels::active_table(), &kernels::table(Isa::kScalar));
  kernels::set_active_isa(before);
  EXPECT_EQ(kernels::active_isa(), before);
}

TEST(Kernels, UnsupportedIsaIsRejected) {
  for (Isa isa : {Isa::kAvx2, Isa::kNeon}) {
    if (!kernels::isa_supported(isa)) {
      EXPECT_THROW(kernels::set_active_isa(isa), InvalidArgument);
      EXPECT_THROW(kernels::table(isa), InvalidArgument);
    }
  }
  EXPECT_THROW(kernels::parse_isa("sse9"), InvalidArgument);
  EXPECT_EQ(kernels::parse_isa("scalar"), Isa::kScalar);
}

TEST(Kernels, SpanWrappersCheckLengths) {
  std::vector<double> x(3), y(4);
  EXPECT_THROW(kernels::dot(x, y), DimensionError);
  EXPECT_THROW(kernels::axpy(1.0, x, y), DimensionError);
  Matrix a(2, 3);
  EXPECT_THROW(kernels::gemv(1.0, a, y, 0.0, x), DimensionError);
}

TEST(Kernels, Norm2) {
  std::vector<double> v{3, 4};
  EXPECT_DOUBLE_EQ(kernels::norm2(v), 5.0);
}

}  // namespace
}  // namespace sifl
