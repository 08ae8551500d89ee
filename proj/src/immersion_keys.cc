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

#include <Eigen/Dense>
#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <random>
#include <string>
#include <utility>

#include "sifl/error.h"
#include "sifl/kernels.h"
#include "sifl/rng.h"

namespace sifl {
namespace {

using RowMajor =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMap = Eigen::Map<const RowMajor>;

ConstMap as_eigen(const Matrix& m) {
  return ConstMap(m.data().data(), static_cast<Eigen::Index>(m.rows()),
                  static_cast<Eigen::Index>(m.cols()));
}

Matrix from_eigen(const Eigen::MatrixXd& e) {
  Matrix out(static_cast<std::size_t>(e.rows()),
             static_cast<std::size_t>(e.cols()));
  for (Eigen::Index i = 0; i < e.rows(); ++i) {
    for (Eigen::Index j = 0; j < e.cols(); ++j) {
      out(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = e(i, j);
    }
  }
  return out;
}

double inf_norm(const Eigen::MatrixXd& a) {
  if (a.size() == 0) return 0.0;
  return a.cwiseAbs().rowwise().sum().maxCoeff();
}

std::string shape(const Matrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

void check_block_dims(std::size_t expected, std::size_t actual,
                      const char* what) {
  if (expected != actual) {
    throw DimensionError(std::string(what) + ": expected length " +
                         std::to_string(expected) + ", got " +
                         std::to_string(actual));
  }
}

}  // namespace

double right_inverse_residual(const ImmersionKey& key) {
  const Eigen::MatrixXd mg = as_eigen(key.decryption()) * as_eigen(key.encoding());
  return inf_norm(mg - Eigen::MatrixXd::Identity(mg.rows(), mg.cols()));
}

double kernel_residual(const ImmersionKey& key) {
  return inf_norm(as_eigen(key.decryption()) * as_eigen(key.kernel()));
}

double gram_condition(const Matrix& decryption) {
  const Eigen::MatrixXd gram =
      as_eigen(decryption) * as_eigen(decryption).transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram,
                                                     Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (!(lo > 0.0)) return std::numeric_limits<double>::infinity();
  return hi / lo;
}

ImmersionKey ImmersionKey::from_matrices(Matrix decryption, Matrix encoding,
                                         Matrix kernel) {
  const std::size_t n = decryption.rows();
  const std::size_t m = decryption.cols();
  if (n == 0 || m <= n) {
    throw InvalidArgument("decryption matrix must be n x m with m > n >= 1, got " +
                          shape(decryption));
  }
  if (encoding.rows() != m || encoding.cols() != n) {
    throw InvalidArgument("encoding matrix must be " + std::to_string(m) + "x" +
                          std::to_string(n) + ", got " + shape(encoding));
  }
  if (kernel.rows() != m || kernel.cols() != m - n) {
    throw InvalidArgument("kernel matrix must be " + std::to_string(m) + "x" +
                          std::to_string(m - n) + ", got " + shape(kernel));
  }
  ImmersionKey key(std::move(decryption), std::move(encoding), std::move(kernel));

  // MG = I already forces rank(G) = n.
  if (const double r = right_inverse_residual(key); !(r <= kKeyIdentityTolerance)) {
    throw InvalidArgument("||MG - I||_inf = " + std::to_string(r) +
                          " exceeds tolerance");
  }
  if (const double r = kernel_residual(key); !(r <= kKeyIdentityTolerance)) {
    throw InvalidArgument("||MN||_inf = " + std::to_string(r) +
                          " exceeds tolerance");
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> kernel_qr(as_eigen(key.kernel_));
  if (static_cast<std::size_t>(kernel_qr.rank()) != m - n) {
    throw InvalidArgument("kernel matrix N is rank deficient");
  }
  return key;
}

ImmersionKey ImmersionKey::from_decryption_matrix(Matrix decryption) {
  const auto n = static_cast<Eigen::Index>(decryption.rows());
  const auto m = static_cast<Eigen::Index>(decryption.cols());
  if (n == 0 || m <= n) {
    throw InvalidArgument("decryption matrix must be n x m with m > n >= 1, got " +
                          shape(decryption));
  }
  // M^T = Q [R; 0]. With Q = [Q1 Q2]: M = R^T Q1^T, so G = Q1 R^{-T} satisfies
  // MG = I and equals M^T (M M^T)^{-1}; the columns of Q2 are an orthonormal
  // basis of ker M.
  const Eigen::MatrixXd mt = as_eigen(decryption).transpose();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(mt);
  const Eigen::MatrixXd q = qr.householderQ();
  const Eigen::MatrixXd r = qr.matrixQR().topRows(n).triangularView<Eigen::Upper>();
  const double diag_max = r.diagonal().cwiseAbs().maxCoeff();
  if (!(r.diagonal().cwiseAbs().minCoeff() >
        diag_max * std::numeric_limits<double>::epsilon() * static_cast<double>(m))) {
    throw InvalidArgument("decryption matrix is not of full row rank");
  }
  const Eigen::MatrixXd gt =
      r.triangularView<Eigen::Upper>().solve(q.leftCols(n).transpose());
  return from_matrices(std::move(decryption), from_eigen(gt.transpose()),
                       from_eigen(q.rightCols(m - n)));
}

ImmersionKey generate_key(std::size_t n, std::size_t r, std::uint64_t seed,
                          const KeyGenOptions& options) {
  if (n < 1) throw InvalidArgument("generate_key: plain dimension n must be >= 1");
  if (r < 1) throw InvalidArgument("generate_key: expansion r must be >= 1");
  const std::size_t m = n + r;
  for (int attempt = 0; attempt < options.max_attempts; ++attempt) {
    Rng rng(derive_seed(seed, {kKeyStream, static_cast<std::uint64_t>(attempt)}));
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix decryption(n, m);
    for (double& x : decryption.data()) x = normal(rng);
    if (!(gram_condition(decryption) <= options.max_condition)) continue;
    try {
      return ImmersionKey::from_decryption_matrix(std::move(decryption));
    } catch (const InvalidArgument&) {
      // Residual above tolerance: treat like a conditioning failure.
    }
  }
  throw KeyGenerationError(
      "generate_key: no key with cond(MM^T) <= " +
          std::to_string(options.max_condition) + " for seed " +
          std::to_string(seed) + " after " +
          std::to_string(options.max_attempts) + " attempts",
      seed, options.max_attempts);
}

KeySet::KeySet(std::vector<ImmersionKey> blocks) : blocks_(std::move(blocks)) {
  if (blocks_.empty()) throw InvalidArgument("KeySet: no blocks");
  layout_.reserve(blocks_.size());
  std::size_t kernel_offset = 0;
  for (const ImmersionKey& key : blocks_) {
    layout_.push_back({plain_dim_, key.plain_dim(), immersed_dim_,
                       key.immersed_dim(), kernel_offset, key.expansion()});
    plain_dim_ += key.plain_dim();
    immersed_dim_ += key.immersed_dim();
    kernel_offset += key.expansion();
  }
}

std::vector<std::size_t> split_blocks(std::size_t total, std::size_t block_max) {
  if (total == 0) throw InvalidArgument("split_blocks: nothing to split");
  if (block_max == 0) throw InvalidArgument("split_blocks: block_max must be >= 1");
  std::vector<std::size_t> sizes(total / block_max, block_max);
  if (total % block_max != 0) sizes.push_back(total % block_max);
  return sizes;
}

KeySet generate_keyset(std::span<const std::size_t> block_sizes, std::size_t r,
                       std::uint64_t seed, const KeyGenOptions& options) {
  if (block_sizes.empty()) throw InvalidArgument("generate_keyset: empty layout");
  std::vector<ImmersionKey> blocks;
  blocks.reserve(block_sizes.size());
  for (std::size_t j = 0; j < block_sizes.size(); ++j) {
    if (block_sizes[j] == 0) {
      throw InvalidArgument("generate_keyset: block " + std::to_string(j) +
                            " has size 0");
    }
    blocks.push_back(generate_key(block_sizes[j], r,
                                  derive_seed(seed, {kKeyStream, j}), options));
  }
  return KeySet(std::move(blocks));
}

void FreshnessLog::record(std::uint64_t digest, std::uint32_t round) {
  std::lock_guard lock(mu_);
  const auto [it, inserted] = seen_.emplace(digest, round);
  if (!inserted) {
    throw FreshnessError("kernel randomness for round " + std::to_string(round) +
                             " repeats the randomness of round " +
                             std::to_string(it->second),
                         round, it->second);
  }
}

bool FreshnessLog::contains(std::uint64_t digest) const {
  std::lock_guard lock(mu_);
  return seen_.contains(digest);
}

std::size_t FreshnessLog::size() const {
  std::lock_guard lock(mu_);
  return seen_.size();
}

std::uint64_t randomness_digest(std::span<const double> values) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (double v : values) {
    auto bits = std::bit_cast<std::uint64_t>(v);
    for (int b = 0; b < 8; ++b) {
      h ^= (bits >> (8 * b)) & 0xff;
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

RandomnessSource::RandomnessSource(std::uint64_t seed, double scale)
    : seed_(seed), scale_(scale) {
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw InvalidArgument("RandomnessSource: scale must be positive and finite");
  }
}

RoundRandomness RandomnessSource::draw(const KeySet& keys, std::uint32_t round) {
  Rng rng(derive_seed(seed_, {kRandomnessStream, round}));
  std::normal_distribution<double> normal(0.0, scale_);
  RoundRandomness out{round, std::vector<double>(keys.randomness_dim())};
  for (double& x : out.values) x = normal(rng);
  log_.record(randomness_digest(out.values), round);
  return out;
}

RoundRandomness fresh_randomness(const KeySet& keys, std::uint32_t round,
                                 RandomnessSource& source) {
  return source.draw(keys, round);
}

void encrypt_into(const KeySet& keys, std::span<const double> w,
                  std::span<const double> randomness, std::span<double> out) {
  check_block_dims(keys.plain_dim(), w.size(), "encrypt: parameter vector");
  check_block_dims(keys.randomness_dim(), randomness.size(),
                   "encrypt: randomness vector");
  check_block_dims(keys.immersed_dim(), out.size(), "encrypt: output");
  for (std::size_t j = 0; j < keys.block_count(); ++j) {
    const BlockLayout& b = keys.layout(j);
    const ImmersionKey& key = keys.block(j);
    auto dst = out.subspan(b.immersed_offset, b.immersed_dim);
    kernels::gemv(1.0, key.encoding(), w.subspan(b.plain_offset, b.plain_dim),
                  0.0, dst);
    kernels::gemv(1.0, key.kernel(),
                  randomness.subspan(b.kernel_offset, b.kernel_dim), 1.0, dst);
  }
}

void decrypt_into(const KeySet& keys, std::span<const double> v,
                  std::span<double> out) {
  check_block_dims(keys.immersed_dim(), v.size(), "decrypt: encrypted vector");
  check_block_dims(keys.plain_dim(), out.size(), "decrypt: output");
  for (std::size_t j = 0; j < keys.block_count(); ++j) {
    const BlockLayout& b = keys.layout(j);
    kernels::gemv(1.0, keys.block(j).decryption(),
                  v.subspan(b.immersed_offset, b.immersed_dim), 0.0,
                  out.subspan(b.plain_offset, b.plain_dim));
  }
}

void add_encoded(const KeySet& keys, double alpha, std::span<const double> g,
                 std::span<double> out) {
  check_block_dims(keys.plain_dim(), g.size(), "add_encoded: plain vector");
  check_block_dims(keys.immersed_dim(), out.size(), "add_encoded: output");
  for (std::size_t j = 0; j < keys.block_count(); ++j) {
    const BlockLayout& b = keys.layout(j);
    kernels::gemv(alpha, keys.block(j).encoding(),
                  g.subspan(b.plain_offset, b.plain_dim), 1.0,
                  out.subspan(b.immersed_offset, b.immersed_dim));
  }
}

EncryptedParamVector encrypt(const KeySet& keys, const ParamVector& w,
                             const RoundRandomness& randomness) {
  EncryptedParamVector out{std::vector<double>(keys.immersed_dim()),
                           randomness.round};
  encrypt_into(keys, w.values, randomness.values, out.values);
  return out;
}

ParamVector decrypt(const KeySet& keys, const EncryptedParamVector& v) {
  ParamVector out{std::vector<double>(keys.plain_dim())};
  decrypt_into(keys, v.values, out.values);
  return out;
}

}  // namespace sifl
