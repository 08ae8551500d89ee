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

// The aggregator's public surface must not reach the key machinery. This
// translation unit includes only the aggregator header and is linked only
// against the aggregator library: a transitive include of the key header
// fails compilation, and a call into the key library fails the link.

#include "sifl/aggregator.h"

#ifdef SIFL_IMMERSION_KEYS_H_
#error "aggregator.h exposes the immersion key header"
#endif
#ifdef SIFL_LEARNER_H_
#error "aggregator.h exposes the learner header"
#endif

#include <gtest/gtest.h>

#include <type_traits>

namespace sifl {
namespace {

// No aggregator operation produces plaintext parameters.
static_assert(std::is_same_v<decltype(aggregate(std::declval<std::span<const EncryptedParamVector>>(),
                                                std::declval<std::span<const std::size_t>>())),
                             EncryptedParamVector>);
static_assert(std::is_same_v<decltype(std::declval<Aggregator&>().finish()), Message>);
static_assert(!std::is_convertible_v<EncryptedParamVector, ParamVector>);
static_assert(!std::is_constructible_v<ParamVector, EncryptedParamVector>);

TEST(AggregatorBlindness, WorksWithoutKeys) {
  Aggregator agg(1);
  agg.begin_round(0);
  agg.accept(make_update(0, 1, 2, 0.5, std::vector<double>{1.0, 2.0}));
  const Message out = agg.finish();
  EXPECT_EQ(out.payload, (std::vector<double>{0.5, 1.0, 2.0}));
}

}  // namespace
}  // namespace sifl
