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

#ifndef SIFL_ERROR_H_
#define SIFL_ERROR_H_

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>

namespace sifl {

// Root of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Vector or matrix dimensions disagree with what an operation requires.
class DimensionError : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Key generation could not produce a well-conditioned key.
class KeyGenerationError : public Error {
 public:
  KeyGenerationError(const std::string& what, std::uint64_t seed, int attempts)
      : Error(what), seed_(seed), attempts_(attempts) {}
  std::uint64_t seed() const { return seed_; }
  int attempts() const { return attempts_; }

 private:
  std::uint64_t seed_;
  int attempts_;
};

// Round randomness was observed twice within one run.
class FreshnessError : public Error {
 public:
  FreshnessError(const std::string& what, std::uint32_t round,
                 std::uint32_t previous_round)
      : Error(what), round_(round), previous_round_(previous_round) {}
  std::uint32_t round() const { return round_; }
  std::uint32_t previous_round() const { return previous_round_; }

 private:
  std::uint32_t round_;
  std::uint32_t previous_round_;
};

// NaN or Inf produced inside the network.
class NumericError : public Error {
 public:
  NumericError(const std::string& what, std::size_t layer)
      : Error(what), layer_(layer) {}
  std::size_t layer() const { return layer_; }

 private:
  std::size_t layer_;
};

// Violation of the round protocol (missing client, mixed rounds, ...).
class ProtocolError : public Error {
 public:
  using Error::Error;
};

// Malformed byte stream. `offset` is the position of the offending field.
class DecodeError : public Error {
 public:
  DecodeError(const std::string& what, std::size_t offset)
      : Error(what + " at byte offset " + std::to_string(offset)),
        offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

// Bad run configuration. line() is 0 for errors not tied to a line.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& what, std::size_t line, std::string key)
      : Error(what), line_(line), key_(std::move(key)) {}
  std::size_t line() const { return line_; }
  const std::string& key() const { return key_; }

 private:
  std::size_t line_;
  std::string key_;
};

class DatasetError : public Error {
 public:
  enum class Kind { kIo, kMagicMismatch, kTruncated, kCountMismatch, kFormat };
  DatasetError(const std::string& what, Kind kind) : Error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

}  // namespace sifl

#endif  // SIFL_ERROR_H_
