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

#ifndef SIFL_RNG_H_
#define SIFL_RNG_H_

#include <cstdint>
#include <initializer_list>
#include <random>

namespace sifl {

using Rng = std::mt19937_64;

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Derives an independent stream seed from a root seed and a tag path, e.g.
// derive_seed(seed, {kShuffleStream, round, client}).
constexpr std::uint64_t derive_seed(std::uint64_t root,
                                    std::initializer_list<std::uint64_t> tags) {
  std::uint64_t h = mix64(root);
  for (std::uint64_t tag : tags) h = mix64(h ^ mix64(tag + 0x632be59bd9b4e019ULL));
  return h;
}

// Stream tags used across the library so that no two consumers share a stream.
enum SeedStream : std::uint64_t {
  kKeyStream = 1,
  kRandomnessStream = 2,
  kInitStream = 3,
  kShuffleStream = 4,
  kDataStream = 5,
  kPartitionStream = 6,
};

}  // namespace sifl

#endif  // SIFL_RNG_H_
