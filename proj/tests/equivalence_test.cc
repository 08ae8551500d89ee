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

#include <gtest/gtest.h>

#include <cmath>
#include <nlohmann/json.hpp>
#include <random>

#include "sifl/error.h"
#include "test_util.h"

namespace sifl {
namespace {

std::vector<ParamVector> trace(std::size_t rounds, std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<ParamVector> out;
  for (std::size_t t = 0; t < rounds; ++t) out.push_back({testing::gaussian_vector(n, rng)});
  return out;
}

TEST(Equivalence, IdenticalTracesPass) {
  const auto a = trace(5, 10, 1);
  const auto r = check_equivalence(a, a);
  EXPECT_TRUE(r.passed);
  EXPECT_EQ(r.errors, std::vector<double>(5, 0.0));
  EXPECT_EQ(r.max_error, 0.0);
  EXPECT_TRUE(r.failing_rounds().empty());
}

TEST(Equivalence, PerturbedRoundIsReported) {
  const auto a = trace(6, 10, 2);
  auto b = a;
  b[3].values[4] += 1e-3;
  const auto r = check_equivalence(a, b);
  EXPECT_FALSE(r.passed);
  EXPECT_EQ(r.worst_round, 3u);
  EXPECT_EQ(r.failing_rounds(), std::vector<std::size_t>{3});
  // Oracle: 1e-3 / (1 + ||a_3||).
  EXPECT_NEAR(r.errors[3], 1e-3 / (1 + testing::euclid(a[3].values)), 1e-15);
  const auto j = nlohmann::json::parse(r.to_json());
  EXPECT_EQ(j["passed"], false);
  EXPECT_EQ(j["worst_round"], 3);
  EXPECT_EQ(j["failing_rounds"][0], 3);
}

TEST(Equivalence, ThresholdIsInclusive) {
  ParamVector a{{0.0}}, b{{1e-6}};
  EXPECT_TRUE(check_equivalence({a}, {b}, 1e-6).passed);
  EXPECT_FALSE(check_equivalence({a}, {b}, 0.9e-6).passed);
}

TEST(Equivalence, NanFails) {
  ParamVector a{{1.0}}, b{{std::nan("")}};
  const auto r = check_equivalence({a}, {b});
  EXPECT_FALSE(r.passed);
}

TEST(Equivalence, LengthMismatch) {
  EXPECT_THROW(check_equivalence(trace(3, 4, 1), trace(2, 4, 1)), InvalidArgument);
  EXPECT_THROW(check_equivalence(trace(1, 4, 1), trace(1, 5, 1)), InvalidArgument);
}

TEST(Equivalence, DecryptsEncryptedTrace) {
  const KeySet keys = generate_keyset(split_blocks(12, 5), 1, 3);
  const auto plain = trace(4, 12, 4);
  std::mt19937_64 rng(5);
  std::vector<EncryptedParamVector> enc;
  for (std::uint32_t t = 0; t < 4; ++t) {
    enc.push_back(encrypt(keys, plain[t],
                          RoundRandomness{t, testing::gaussian_vector(keys.randomness_dim(), rng)}));
  }
  const auto r = check_equivalence(plain, enc, keys);
  EXPECT_TRUE(r.passed);
  EXPECT_LE(r.max_error, 1e-12);
}

}  // namespace
}  // namespace sifl
