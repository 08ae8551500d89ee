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

#ifndef SIFL_IMMERSION_KEYS_H_
#define SIFL_IMMERSION_KEYS_H_

// Random-matrix encryption of model parameters.
//
// A key is a triple (M, G, N) with M in R^{n x m} (m > n), MG = I_n and
// MN = 0. Parameters are lifted to the higher-dimensional space by the affine
// immersion map
//
//   encrypt(w) = G w + N R_t
//
// where R_t is drawn fresh every global round, and recovered with the left
// inverse decrypt(v) = M v. Because encrypt is affine in w and a convex
// combination keeps the N R_t term intact, weighted averages commute with
// decryption.
//
// Large models use a KeySet: the flat parameter vector is cut into contiguous
// blocks, each with an independent key. All identities hold blockwise.

#include <cstddef>
#include <cstdint>
#include <mutex>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include "sifl/matrix.h"
#include "sifl/vectors.h"

namespace sifl {

inline constexpr double kKeyIdentityTolerance = 1e-9;

struct KeyGenOptions {
  // Upper bound on cond(M M^T); keys above it are re-sampled.
  double max_condition = 1e6;
  int max_attempts = 16;
};

class ImmersionKey {
 public:
  // Adopts explicit matrices after checking shapes, MG = I, MN = 0 (both to
  // kKeyIdentityTolerance in the induced infinity norm) and full column rank
  // of N. Throws InvalidArgument on violation.
  static ImmersionKey from_matrices(Matrix decryption, Matrix encoding,
                                    Matrix kernel);

  // Derives G = M^T (M M^T)^{-1} and an orthonormal basis N of ker M from a
  // full-row-rank decryption matrix M.
  static ImmersionKey from_decryption_matrix(Matrix decryption);

  std::size_t plain_dim() const { return decryption_.rows(); }
  std::size_t immersed_dim() const { return decryption_.cols(); }
  std::size_t expansion() const { return immersed_dim() - plain_dim(); }

  const Matrix& decryption() const { return decryption_; }  // M, n x m
  const Matrix& encoding() const { return encoding_; }      // G, m x n
  const Matrix& kernel() const { return kernel_; }          // N, m x (m-n)

  friend bool operator==(const ImmersionKey&, const ImmersionKey&) = default;

 private:
  ImmersionKey(Matrix m, Matrix g, Matrix n)
      : decryption_(std::move(m)), encoding_(std::move(g)), kernel_(std::move(n)) {}

  Matrix decryption_;
  Matrix encoding_;
  Matrix kernel_;
};

// ||M G - I||_inf and ||M N||_inf (max absolute row sums).
double right_inverse_residual(const ImmersionKey& key);
double kernel_residual(const ImmersionKey& key);
// cond(M M^T) from its extreme eigenvalues.
double gram_condition(const Matrix& decryption);

// Samples M with i.i.d. standard normal entries, re-sampling with a new
// sub-seed while cond(M M^T) exceeds options.max_condition. Throws
// InvalidArgument for n == 0 or r == 0 and KeyGenerationError once the retry
// budget is exhausted.
ImmersionKey generate_key(std::size_t n, std::size_t r, std::uint64_t seed,
                          const KeyGenOptions& options = {});

struct BlockLayout {
  std::size_t plain_offset;
  std::size_t plain_dim;
  std::size_t immersed_offset;
  std::size_t immersed_dim;
  std::size_t kernel_offset;
  std::size_t kernel_dim;
};

class KeySet {
 public:
  KeySet() = default;
  explicit KeySet(std::vector<ImmersionKey> blocks);

  std::size_t block_count() const { return blocks_.size(); }
  const ImmersionKey& block(std::size_t j) const { return blocks_[j]; }
  const BlockLayout& layout(std::size_t j) const { return layout_[j]; }
  std::span<const BlockLayout> layout() const { return layout_; }

  std::size_t plain_dim() const { return plain_dim_; }
  std::size_t immersed_dim() const { return immersed_dim_; }
  std::size_t randomness_dim() const { return immersed_dim_ - plain_dim_; }

  friend bool operator==(const KeySet& a, const KeySet& b) {
    return a.blocks_ == b.blocks_;
  }

 private:
  std::vector<ImmersionKey> blocks_;
  std::vector<BlockLayout> layout_;
  std::size_t plain_dim_ = 0;
  std::size_t immersed_dim_ = 0;
};

// Cuts `total` into ceil(total / block_max) contiguous blocks; all but the
// last hold exactly block_max entries.
std::vector<std::size_t> split_blocks(std::size_t total, std::size_t block_max);

// One key per block, each with a sub-seed derived from `seed` and the block
// index. Throws InvalidArgument on an empty layout or a zero-sized block.
KeySet generate_keyset(std::span<const std::size_t> block_sizes, std::size_t r,
                       std::uint64_t seed, const KeyGenOptions& options = {});

// Kernel randomness R_t for one global round.
struct RoundRandomness {
  std::uint32_t round = 0;
  std::vector<double> values;
};

// Append-only record of randomness digests seen in one run. Thread-safe.
class FreshnessLog {
 public:
  // Throws FreshnessError if `digest` was already recorded.
  void record(std::uint64_t digest, std::uint32_t round);
  bool contains(std::uint64_t digest) const;
  std::size_t size() const;

 private:
  mutable std::mutex mu_;
  std::unordered_map<std::uint64_t, std::uint32_t> seen_;
};

// 64-bit FNV-1a over the IEEE-754 bytes of `values`.
std::uint64_t randomness_digest(std::span<const double> values);

// Per-run source of kernel randomness. The draw for round t depends only on
// (seed, t): entries are i.i.d. N(0, scale^2).
class RandomnessSource {
 public:
  explicit RandomnessSource(std::uint64_t seed, double scale = 1.0);

  RoundRandomness draw(const KeySet& keys, std::uint32_t round);
  const FreshnessLog& log() const { return log_; }

 private:
  std::uint64_t seed_;
  double scale_;
  FreshnessLog log_;
};

RoundRandomness fresh_randomness(const KeySet& keys, std::uint32_t round,
                                 RandomnessSource& source);

// Blockwise G_j w_j + N_j R_j.
EncryptedParamVector encrypt(const KeySet& keys, const ParamVector& w,
                             const RoundRandomness& randomness);
// Blockwise M_j v_j.
ParamVector decrypt(const KeySet& keys, const EncryptedParamVector& v);

// Span forms used on hot paths. Throw DimensionError on size mismatch.
void encrypt_into(const KeySet& keys, std::span<const double> w,
                  std::span<const double> randomness, std::span<double> out);
void decrypt_into(const KeySet& keys, std::span<const double> v,
                  std::span<double> out);
// out = alpha * blockwise(G_j g_j) + out
void add_encoded(const KeySet& keys, double alpha, std::span<const double> g,
                 std::span<double> out);

}  // namespace sifl

#endif  // SIFL_IMMERSION_KEYS_H_
