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

#include "sifl/aggregator.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "sifl/error.h"
#include "sifl/immersion_keys.h"
#include "test_util.h"

namespace sifl {
namespace {

using testing::max_abs_diff;

TEST(Aggregate, HandExample) {
  // encrypt(4, R=2) and encrypt(8, R=2) under M = [2, 1], N = [1; -2].
  const std::vector<EncryptedParamVector> updates{{{3.6, -3.2}, 0}, {{5.2, -2.4}, 0}};
  const std::vector<std::size_t> sizes{1, 3};
  const auto agg = aggregate(updates, sizes);
  EXPECT_NEAR(agg.values[0], 4.8, 1e-15);
  EXPECT_NEAR(agg.values[1], -2.6, 1e-15);
  EXPECT_NEAR(decrypt(testing::example_keyset(), agg).values[0], 7.0, 1e-14);
  // The inputs really are those encryptions.
  const KeySet keys = testing::example_keyset();
  EXPECT_LE(max_abs_diff(encrypt(keys, ParamVector{{4.0}}, RoundRandomness{0, {2.0}}).values,
                         updates[0].values),
            1e-15);
  EXPECT_LE(max_abs_diff(encrypt(keys, ParamVector{{8.0}}, RoundRandomness{0, {2.0}}).values,
                         updates[1].values),
            1e-15);
}

TEST(Aggregate, SingleAndIdentical) {
  const EncryptedParamVector u{{0.1, 0.7, -3.0}, 2};
  EXPECT_EQ(aggregate(std::vector{u}, std::vector<std::size_t>{17}).values, u.values);
  const auto two = aggregate(std::vector{u, u}, std::vector<std::size_t>{5, 5});
  EXPECT_EQ(two.values, u.values);
  EXPECT_EQ(two.round, 2u);
}

TEST(Aggregate, Errors) {
  const EncryptedParamVector a{{1.0, 2.0}, 0}, b{{1.0, 2.0}, 1}, c{{1.0}, 0};
  EXPECT_THROW(aggregate(std::vector{a, b}, std::vector<std::size_t>{1, 1}), ProtocolError);
  EXPECT_THROW(aggregate(std::vector{a, c}, std::vector<std::size_t>{1, 1}), ProtocolError);
  EXPECT_THROW(aggregate(std::vector{a}, std::vector<std::size_t>{0}), ProtocolError);
  EXPECT_THROW(aggregate(std::vector{a}, std::vector<std::size_t>{1, 2}), ProtocolError);
  EXPECT_THROW(aggregate(std::vector<EncryptedParamVector>{}, std::vector<std::size_t>{}),
               ProtocolError);
}

TEST(Aggregate, CommutesWithDecryption) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + rng() % 30;
    const KeySet keys = generate_keyset(split_blocks(n, 1 + rng() % 10), 1 + rng() % 3, rng());
    const RoundRandomness r{3, testing::gaussian_vector(keys.randomness_dim(), rng)};
    const std::size_t clients = 1 + rng() % 8;
    std::vector<ParamVector> plain;
    std::vector<EncryptedParamVector> enc;
    std::vector<std::size_t> sizes;
    for (std::size_t i = 0; i < clients; ++i) {
      plain.push_back(ParamVector{testing::gaussian_vector(n, rng)});
      enc.push_back(encrypt(keys, plain.back(), r));
      sizes.push_back(1 + rng() % 200);
    }
    const std::size_t total = [&] {
      std::size_t t = 0;
      for (auto s : sizes) t += s;
      return t;
    }();
    std::vector<double> expect(n, 0.0);
    for (std::size_t i = 0; i < clients; ++i) {
      for (std::size_t k = 0; k < n; ++k) {
        expect[k] += static_cast<double>(sizes[i]) / total * plain[i].values[k];
      }
    }
    EXPECT_LE(max_abs_diff(decrypt(keys, aggregate(enc, sizes)).values, expect), 1e-8);
  }
}

Message update(std::uint16_t id, std::uint32_t round, std::size_t size,
               std::vector<double> params) {
  return make_update(round, id, size, 0.1 * id, params);
}

TEST(Aggregator, ArrivalOrderDoesNotMatter) {
  std::mt19937_64 rng(2);
  const std::size_t clients = 6;
  std::vector<Message> updates;
  for (std::uint16_t id = 1; id <= clients; ++id) {
    updates.push_back(update(id, 4, 1 + rng() % 50, testing::gaussian_vector(40, rng)));
  }
  Aggregator reference(clients);
  reference.begin_round(4);
  for (const auto& u : updates) reference.accept(u);
  const Message expect = reference.finish();
  for (int perm = 0; perm < 20; ++perm) {
    std::shuffle(updates.begin(), updates.end(), rng);
    Aggregator agg(clients);
    agg.begin_round(4);
    for (const auto& u : updates) agg.accept(u);
    EXPECT_TRUE(agg.complete());
    EXPECT_EQ(agg.finish(), expect);  // bit-identical
  }
}

TEST(Aggregator, WeightedLossAndPayload) {
  Aggregator agg(2);
  agg.begin_round(0);
  agg.accept(make_update(0, 2, 3, 2.0, std::vector<double>{5.2, -2.4}));
  agg.accept(make_update(0, 1, 1, 1.0, std::vector<double>{3.6, -3.2}));
  const Message out = agg.finish();
  EXPECT_EQ(out.kind, MessageKind::kAggregate);
  ASSERT_EQ(out.payload.size(), 3u);
  EXPECT_DOUBLE_EQ(out.payload[0], 1.75);  // (1*1 + 3*2) / 4
  EXPECT_NEAR(out.payload[1], 4.8, 1e-15);
  EXPECT_NEAR(out.payload[2], -2.6, 1e-15);
}

TEST(Aggregator, MissingClientNamed) {
  Aggregator agg(4);
  agg.begin_round(7);
  for (std::uint16_t id : {1, 2, 4}) agg.accept(update(id, 7, 10, {1.0}));
  EXPECT_FALSE(agg.complete());
  EXPECT_EQ(agg.missing(), std::vector<std::uint16_t>{3});
  try {
    agg.finish();
    FAIL();
  } catch (const ProtocolError& e) {
    EXPECT_NE(std::string(e.what()).find("client 3"), std::string::npos) << e.what();
    EXPECT_NE(std::string(e.what()).find("round 7"), std::string::npos) << e.what();
  }
}

TEST(Aggregator, RejectsBadUpdates) {
  Aggregator agg(2);
  EXPECT_THROW(agg.accept(update(1, 0, 1, {1.0})), ProtocolError);  // no round open
  agg.begin_round(1);
  EXPECT_THROW(agg.accept(update(1, 0, 1, {1.0})), ProtocolError);  // wrong round
  EXPECT_THROW(agg.accept(update(3, 1, 1, {1.0})), ProtocolError);  // unknown id
  EXPECT_THROW(agg.accept(update(0, 1, 1, {1.0})), ProtocolError);
  EXPECT_THROW(agg.accept(Message{MessageKind::kGlobal, 1, 1, {1.0}, {}}), ProtocolError);
  Message bad_size = update(1, 1, 1, {1.0});
  bad_size.payload[0] = 2.5;
  EXPECT_THROW(agg.accept(bad_size), ProtocolError);
  agg.accept(update(1, 1, 1, {1.0}));
  EXPECT_THROW(agg.accept(update(1, 1, 1, {1.0})), ProtocolError);  // duplicate
  agg.accept(update(2, 1, 1, {1.0, 2.0}));
  EXPECT_THROW(agg.finish(), ProtocolError);  // mixed dimensions
}

}  // namespace
}  // namespace sifl
