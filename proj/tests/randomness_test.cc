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

#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "sifl/error.h"
#include "sifl/immersion_keys.h"
#include "sifl/rng.h"

namespace sifl {
namespace {

KeySet keys() { return generate_keyset(split_blocks(30, 8), 2, 1); }

TEST(Randomness, ConsecutiveRoundsDiffer) {
  const KeySet k = keys();
  RandomnessSource src(4);
  const auto r0 = fresh_randomness(k, 0, src);
  const auto r1 = fresh_randomness(k, 1, src);
  EXPECT_EQ(r0.values.size(), k.randomness_dim());
  EXPECT_EQ(r0.round, 0u);
  EXPECT_EQ(r1.round, 1u);
  EXPECT_NE(r0.values, r1.values);
  EXPECT_NE(randomness_digest(r0.values), randomness_digest(r1.values));
  EXPECT_EQ(src.log().size(), 2u);
}

TEST(Randomness, DeterministicInSeedAndRound) {
  const KeySet k = keys();
  RandomnessSource a(4), b(4);
  fresh_randomness(k, 0, b);  // history does not matter
  EXPECT_EQ(fresh_randomness(k, 3, a).values, fresh_randomness(k, 3, b).values);
  RandomnessSource c(4), d(5);
  EXPECT_NE(fresh_randomness(k, 3, c).values, fresh_randomness(k, 3, d).values);
}

TEST(Randomness, ReplayRaisesFreshnessError) {
  const KeySet k = keys();
  RandomnessSource src(4);
  fresh_randomness(k, 0, src);
  try {
    fresh_randomness(k, 0, src);
    FAIL() << "expected FreshnessError";
  } catch (const FreshnessError& e) {
    EXPECT_EQ(e.round(), 0u);
    EXPECT_EQ(e.previous_round(), 0u);
  }
}

TEST(Randomness, LogRejectsKnownDigest) {
  FreshnessLog log;
  log.record(99, 1);
  EXPECT_TRUE(log.contains(99));
  EXPECT_THROW(log.record(99, 5), FreshnessError);
  EXPECT_NO_THROW(log.record(100, 5));
}

TEST(Randomness, DigestIsFnv1a) {
  // FNV-1a 64 of the empty input is the offset basis.
  EXPECT_EQ(randomness_digest({}), 0xcbf29ce484222325ULL);
  // One binary64 zero: eight zero bytes, computed step by step.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (int i = 0; i < 8; ++i) h = (h ^ 0) * 0x100000001b3ULL;
  const double zero = 0.0;
  EXPECT_EQ(randomness_digest(std::span(&zero, 1)), h);
}

TEST(Randomness, ScaleControlsSpread) {
  const KeySet k = generate_keyset(split_blocks(4000, 4), 1, 2);  // 1000 entries
  RandomnessSource src(1, 10.0);
  const auto r = fresh_randomness(k, 0, src);
  double ss = 0;
  for (double x : r.values) ss += x * x;
  const double sd = std::sqrt(ss / r.values.size());
  EXPECT_GT(sd, 9.0);
  EXPECT_LT(sd, 11.0);
}

TEST(Rng, DeriveSeedSeparatesStreams) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t a = 0; a < 10; ++a) {
    for (std::uint64_t b = 0; b < 10; ++b) seen.insert(derive_seed(1, {a, b}));
  }
  EXPECT_EQ(seen.size(), 100u);
  EXPECT_NE(derive_seed(1, {2}), derive_seed(2, {1}));
}

}  // namespace
}  // namespace sifl
