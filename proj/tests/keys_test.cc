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

#include "sifl/immersion_keys.h"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "sifl/error.h"
#include "test_util.h"

namespace sifl {
namespace {

using testing::example_keyset;
using testing::inf_norm_minus_identity;
using testing::max_abs_diff;
using testing::naive_matmul;

Matrix transpose(const Matrix& a) {
  Matrix t(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  }
  return t;
}

TEST(ImmersionKey, DerivedFromTwoOne) {
  const auto key = ImmersionKey::from_decryption_matrix(Matrix(1, 2, {2.0, 1.0}));
  EXPECT_NEAR(key.encoding()(0, 0), 0.4, 1e-15);
  EXPECT_NEAR(key.encoding()(1, 0), 0.2, 1e-15);
  // N is proportional to [1; -2].
  const Matrix& n = key.kernel();
  ASSERT_EQ(n.rows(), 2u);
  ASSERT_EQ(n.cols(), 1u);
  EXPECT_NEAR(n(1, 0) / n(0, 0), -2.0, 1e-14);
  EXPECT_NEAR(naive_matmul(key.decryption(), key.encoding())(0, 0), 1.0, 1e-15);
  EXPECT_NEAR(naive_matmul(key.decryption(), key.kernel())(0, 0), 0.0, 1e-15);
}

TEST(ImmersionKey, ZeroExpansionRejected) {
  EXPECT_THROW(generate_key(3, 0, 1), InvalidArgument);
  EXPECT_THROW(generate_key(0, 1, 1), InvalidArgument);
}

TEST(ImmersionKey, SixteenByTwoSeedSeven) {
  const auto key = generate_key(16, 2, 7);
  EXPECT_EQ(key.plain_dim(), 16u);
  EXPECT_EQ(key.immersed_dim(), 18u);
  EXPECT_EQ(key.kernel().cols(), 2u);
  // Independent triple-loop products.
  EXPECT_LE(inf_norm_minus_identity(naive_matmul(key.decryption(), key.encoding()), 1.0),
            1e-9);
  EXPECT_LE(inf_norm_minus_identity(naive_matmul(key.decryption(), key.kernel()), 0.0),
            1e-9);
  // The library's own residuals agree with the oracle's verdict.
  EXPECT_LE(right_inverse_residual(key), 1e-9);
  EXPECT_LE(kernel_residual(key), 1e-9);
}

TEST(ImmersionKey, EncodingIsMoorePenroseRightInverse) {
  // G = M^T (M M^T)^{-1}  <=>  (M M^T) G^T = M.
  const auto key = generate_key(12, 3, 11);
  const Matrix& m = key.decryption();
  const Matrix lhs = naive_matmul(naive_matmul(m, transpose(m)), transpose(key.encoding()));
  EXPECT_LE(max_abs_diff(lhs.data(), m.data()), 1e-10);
}

TEST(ImmersionKey, KernelBasisIsOrthonormal) {
  const auto key = generate_key(10, 4, 5);
  const Matrix ntn = naive_matmul(transpose(key.kernel()), key.kernel());
  EXPECT_LE(inf_norm_minus_identity(ntn, 1.0), 1e-12);
}

TEST(ImmersionKey, ConditionGuard) {
  const auto key = generate_key(20, 1, 3);
  EXPECT_LE(gram_condition(key.decryption()), 1e6);
  EXPECT_NEAR(gram_condition(Matrix(2, 2, {2, 0, 0, 1})), 4.0, 1e-12);
}

TEST(ImmersionKey, GenerationFailureNamesSeedAndAttempts) {
  try {
    generate_key(4, 1, 42, KeyGenOptions{1.0, 5});
    FAIL() << "expected KeyGenerationError";
  } catch (const KeyGenerationError& e) {
    EXPECT_EQ(e.seed(), 42u);
    EXPECT_EQ(e.attempts(), 5);
    EXPECT_NE(std::string(e.what()).find("42"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("5"), std::string::npos);
  }
}

TEST(ImmersionKey, Deterministic) {
  EXPECT_EQ(generate_key(9, 2, 123), generate_key(9, 2, 123));
  EXPECT_FALSE(generate_key(9, 2, 123) == generate_key(9, 2, 124));
}

TEST(ImmersionKey, FromMatricesValidates) {
  // MG != I
  EXPECT_THROW(ImmersionKey::from_matrices(Matrix(1, 2, {2, 1}), Matrix(2, 1, {0.5, 0.5}),
                                           Matrix(2, 1, {1, -2})),
               InvalidArgument);
  // MN != 0
  EXPECT_THROW(ImmersionKey::from_matrices(Matrix(1, 2, {2, 1}), Matrix(2, 1, {0.4, 0.2}),
                                           Matrix(2, 1, {1, 1})),
               InvalidArgument);
  // N rank deficient
  EXPECT_THROW(ImmersionKey::from_matrices(Matrix(1, 2, {2, 1}), Matrix(2, 1, {0.4, 0.2}),
                                           Matrix(2, 1, {0, 0})),
               InvalidArgument);
  // shapes
  EXPECT_THROW(ImmersionKey::from_matrices(Matrix(1, 2, {2, 1}), Matrix(1, 2, {0.4, 0.2}),
                                           Matrix(2, 1, {1, -2})),
               InvalidArgument);
}

TEST(KeySet, TwoBlocksOfFour) {
  const std::vector<std::size_t> layout{4, 4};
  const KeySet keys = generate_keyset(layout, 1, 1);
  ASSERT_EQ(keys.block_count(), 2u);
  EXPECT_EQ(keys.layout(0).plain_offset, 0u);
  EXPECT_EQ(keys.layout(1).plain_offset, 4u);
  EXPECT_EQ(keys.plain_dim(), 8u);
  EXPECT_EQ(keys.immersed_dim(), 10u);
  EXPECT_EQ(keys.randomness_dim(), 2u);
  EXPECT_EQ(keys.layout(1).immersed_offset, 5u);
  // Independent sub-seeds.
  EXPECT_FALSE(keys.block(0) == keys.block(1));
}

TEST(KeySet, EmptyLayoutRejected) {
  EXPECT_THROW(generate_keyset(std::vector<std::size_t>{}, 1, 1), InvalidArgument);
  EXPECT_THROW(generate_keyset(std::vector<std::size_t>{3, 0}, 1, 1), InvalidArgument);
}

TEST(KeySet, SplitBlocks) {
  EXPECT_EQ(split_blocks(10, 4), (std::vector<std::size_t>{4, 4, 2}));
  EXPECT_EQ(split_blocks(8, 4), (std::vector<std::size_t>{4, 4}));
  EXPECT_EQ(split_blocks(3, 256), (std::vector<std::size_t>{3}));
  const auto big = split_blocks(199210, 256);
  EXPECT_EQ(big.size(), 779u);  // ceil(199210 / 256)
  EXPECT_EQ(big.back(), 199210u - 778u * 256u);
}

TEST(KeySet, FullScaleLayoutCoversAllParameters) {
  const auto layout = split_blocks(199210, 256);
  const KeySet keys = generate_keyset(layout, 1, 3);
  EXPECT_EQ(keys.plain_dim(), 199210u);
  EXPECT_EQ(keys.immersed_dim(), 199210u + 779u);
  std::size_t offset = 0;
  for (const BlockLayout& b : keys.layout()) {
    EXPECT_EQ(b.plain_offset, offset);
    offset += b.plain_dim;
  }
  EXPECT_EQ(offset, 199210u);
}

TEST(Encrypt, HandExample) {
  const KeySet keys = example_keyset();
  const auto v = encrypt(keys, ParamVector{{5.0}}, RoundRandomness{0, {3.0}});
  ASSERT_EQ(v.size(), 2u);
  EXPECT_NEAR(v.values[0], 5.0, 1e-15);
  EXPECT_NEAR(v.values[1], -5.0, 1e-15);
  EXPECT_EQ(v.round, 0u);

  const auto z = encrypt(keys, ParamVector{{0.0}}, RoundRandomness{0, {0.0}});
  EXPECT_EQ(z.values, (std::vector<double>{0.0, 0.0}));
}

TEST(Encrypt, CarriesRound) {
  const auto v = encrypt(example_keyset(), ParamVector{{1.0}}, RoundRandomness{7, {1.0}});
  EXPECT_EQ(v.round, 7u);
}

TEST(Encrypt, DimensionMismatch) {
  const KeySet keys = example_keyset();
  EXPECT_THROW(encrypt(keys, ParamVector{{1.0, 2.0}}, RoundRandomness{0, {3.0}}),
               DimensionError);
  EXPECT_THROW(encrypt(keys, ParamVector{{1.0}}, RoundRandomness{0, {3.0, 1.0}}),
               DimensionError);
  EXPECT_THROW(decrypt(keys, EncryptedParamVector{{1.0}, 0}), DimensionError);
}

TEST(Decrypt, HandExamples) {
  const KeySet keys = example_keyset();
  EXPECT_NEAR(decrypt(keys, EncryptedParamVector{{5.0, -5.0}, 0}).values[0], 5.0, 1e-15);
  EXPECT_NEAR(decrypt(keys, EncryptedParamVector{{4.8, -5.1}, 0}).values[0], 4.5, 1e-15);
}

TEST(Decrypt, RoundTripHundredVectors) {
  const KeySet keys = generate_keyset(split_blocks(50, 16), 2, 9);
  std::mt19937_64 rng(10);
  for (int i = 0; i < 100; ++i) {
    ParamVector w{testing::gaussian_vector(keys.plain_dim(), rng, 3.0)};
    RoundRandomness r{static_cast<std::uint32_t>(i),
                      testing::gaussian_vector(keys.randomness_dim(), rng, 5.0)};
    const ParamVector back = decrypt(keys, encrypt(keys, w, r));
    EXPECT_LE(max_abs_diff(back.values, w.values), 1e-9);
  }
}

// Property checks over many random key sets.
class KeyProperties : public ::testing::TestWithParam<std::uint64_t> {};

TEST_P(KeyProperties, MaskingAffinityAndEncodedUpdates) {
  std::mt19937_64 rng(GetParam());
  const std::size_t n = 1 + rng() % 40;
  const std::size_t block = 1 + rng() % 16;
  const std::size_t r = 1 + rng() % 4;
  const KeySet keys = generate_keyset(split_blocks(n, block), r, GetParam());

  const ParamVector w1{testing::gaussian_vector(n, rng)};
  const ParamVector w2{testing::gaussian_vector(n, rng)};
  const RoundRandomness r1{0, testing::gaussian_vector(keys.randomness_dim(), rng)};
  const RoundRandomness r2{1, testing::gaussian_vector(keys.randomness_dim(), rng)};

  // Kernel masking: the difference of two encryptions of w is annihilated by M.
  const auto e1 = encrypt(keys, w1, r1);
  const auto e2 = encrypt(keys, w1, r2);
  EncryptedParamVector diff{e1.values, 0};
  for (std::size_t i = 0; i < diff.size(); ++i) diff.values[i] -= e2.values[i];
  for (double x : decrypt(keys, diff).values) EXPECT_LE(std::abs(x), 1e-9);

  // Affinity for convex combinations.
  const double alpha = std::uniform_real_distribution<double>(0, 1)(rng);
  ParamVector mix{w1.values};
  for (std::size_t i = 0; i < n; ++i) mix.values[i] = alpha * w1.values[i] + (1 - alpha) * w2.values[i];
  const auto lhs = encrypt(keys, mix, r1);
  const auto a = encrypt(keys, w1, r1);
  const auto b = encrypt(keys, w2, r1);
  std::vector<double> rhs(a.size());
  for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] = alpha * a.values[i] + (1 - alpha) * b.values[i];
  EXPECT_LE(max_abs_diff(lhs.values, rhs), 1e-9);

  // add_encoded == blockwise G g, checked against the triple-loop oracle.
  const auto g = testing::gaussian_vector(n, rng);
  std::vector<double> out(keys.immersed_dim(), 0.0);
  add_encoded(keys, 1.0, g, out);
  for (std::size_t j = 0; j < keys.block_count(); ++j) {
    const BlockLayout& bl = keys.layout(j);
    const std::vector<double> gj(g.begin() + bl.plain_offset,
                                 g.begin() + bl.plain_offset + bl.plain_dim);
    const auto expect = testing::naive_matvec(keys.block(j).encoding(), gj);
    const std::vector<double> got(out.begin() + bl.immersed_offset,
                                  out.begin() + bl.immersed_offset + bl.immersed_dim);
    EXPECT_LE(max_abs_diff(got, expect), 1e-12);
  }
}

INSTANTIATE_TEST_SUITE_P(RandomKeySets, KeyProperties, ::testing::Range<std::uint64_t>(1, 51));

TEST(KeySet, DeterministicInSeed) {
  const auto layout = split_blocks(40, 8);
  EXPECT_EQ(generate_keyset(layout, 2, 77), generate_keyset(layout, 2, 77));
}

}  // namespace
}  // namespace sifl
