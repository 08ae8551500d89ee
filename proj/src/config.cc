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

#include "sifl/config.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "sifl/error.h"

namespace sifl {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

struct Field {
  std::size_t line;
  std::string key;

  [[noreturn]] void fail(const std::string& why) const {
    throw ConfigError("line " + std::to_string(line) + ": " + key + ": " + why,
                      line, key);
  }

  std::uint64_t u64(std::string_view v) const {
    std::uint64_t out = 0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size()) {
      fail("expected a non-negative integer, got '" + std::string(v) + "'");
    }
    return out;
  }

  std::size_t count(std::string_view v) const {
    return static_cast<std::size_t>(u64(v));
  }

  double real(std::string_view v) const {
    double out = 0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size() || !std::isfinite(out)) {
      fail("expected a number, got '" + std::string(v) + "'");
    }
    return out;
  }

  std::vector<std::size_t> list(std::string_view v) const {
    std::vector<std::size_t> out;
    while (!v.empty()) {
      const auto comma = v.find(',');
      out.push_back(count(trim(v.substr(0, comma))));
      if (comma == std::string_view::npos) break;
      v.remove_prefix(comma + 1);
    }
    if (out.empty()) fail("expected a comma-separated list of sizes");
    return out;
  }
};

void invalid(const std::string& key, const std::string& why) {
  throw ConfigError(key + ": " + why, 0, key);
}

}  // namespace

void RunConfig::validate() const {
  if (layers.size() < 3) invalid("layers", "need input, >= 1 hidden and output sizes");
  for (std::size_t s : layers) {
    if (s == 0) invalid("layers", "sizes must be >= 1");
  }
  if (clients < 1 || clients > 65535) invalid("clients", "must be in [1, 65535]");
  if (!(lr > 0.0)) invalid("lr", "learning rate must be > 0");
  if (local_epochs < 1) invalid("local_epochs", "must be >= 1");
  if (rounds < 1) invalid("rounds", "must be >= 1");
  if (batch_size < 1) invalid("batch_size", "must be >= 1");
  if (block_max < 1) invalid("block_max", "must be >= 1");
  if (expansion < 1) invalid("expansion", "must be >= 1");
  if (!(randomness_scale > 0.0)) invalid("randomness_scale", "must be > 0");
  if (!(threshold >= 0.0)) invalid("threshold", "must be >= 0");
  if (verbosity < 0 || verbosity > 2) invalid("verbosity", "must be 0, 1 or 2");
  if (dataset.kind == DatasetSource::Kind::kSynthetic) {
    if (dataset.per_client < 1) invalid("synthetic_per_client", "must be >= 1");
    if (dataset.test_samples < 1) invalid("synthetic_test", "must be >= 1");
    if (!(dataset.spread > 0.0)) invalid("synthetic_spread", "must be > 0");
  } else {
    for (const auto& [key, path] :
         {std::pair{"train_images", &dataset.train_images},
          std::pair{"train_labels", &dataset.train_labels},
          std::pair{"test_images", &dataset.test_images},
          std::pair{"test_labels", &dataset.test_labels}}) {
      if (path->empty()) invalid(key, "required when dataset = idx");
    }
  }
}

TrainingConfig RunConfig::training() const {
  validate();
  TrainingConfig t;
  t.model = ModelSpec(layers);
  t.hyper = Hyperparams{lr, local_epochs, rounds, batch_size};
  t.mode = mode;
  t.block_max = block_max;
  t.expansion = expansion;
  t.seed = seed;
  t.randomness_scale = randomness_scale;
  t.verbosity = verbosity;
  return t;
}

RunConfig parse_config(std::string_view text,
                       const std::filesystem::path& base_dir) {
  RunConfig c;
  auto path = [&](std::string_view v) {
    std::filesystem::path p{std::string(v)};
    return p.is_relative() && !base_dir.empty() ? base_dir / p : p;
  };
  using Setter = std::function<void(const Field&, std::string_view)>;
  const std::map<std::string, Setter, std::less<>> setters = {
      {"mode",
       [&](const Field& f, std::string_view v) {
         try {
           c.mode = parse_mode(v);
         } catch (const InvalidArgument& e) {
           f.fail(e.what());
         }
       }},
      {"layers", [&](const Field& f, std::string_view v) { c.layers = f.list(v); }},
      {"clients", [&](const Field& f, std::string_view v) { c.clients = f.count(v); }},
      {"lr", [&](const Field& f, std::string_view v) { c.lr = f.real(v); }},
      {"local_epochs",
       [&](const Field& f, std::string_view v) { c.local_epochs = f.count(v); }},
      {"rounds", [&](const Field& f, std::string_view v) { c.rounds = f.count(v); }},
      {"batch_size",
       [&](const Field& f, std::string_view v) { c.batch_size = f.count(v); }},
      {"block_max",
       [&](const Field& f, std::string_view v) { c.block_max = f.count(v); }},
      {"expansion",
       [&](const Field& f, std::string_view v) { c.expansion = f.count(v); }},
      {"seed", [&](const Field& f, std::string_view v) { c.seed = f.u64(v); }},
      {"randomness_scale",
       [&](const Field& f, std::string_view v) { c.randomness_scale = f.real(v); }},
      {"dataset",
       [&](const Field& f, std::string_view v) {
         if (v == "synthetic") {
           c.dataset.kind = DatasetSource::Kind::kSynthetic;
         } else if (v == "idx") {
           c.dataset.kind = DatasetSource::Kind::kIdx;
         } else {
           f.fail("expected synthetic|idx, got '" + std::string(v) + "'");
         }
       }},
      {"synthetic_per_client",
       [&](const Field& f, std::string_view v) { c.dataset.per_client = f.count(v); }},
      {"synthetic_test",
       [&](const Field& f, std::string_view v) { c.dataset.test_samples = f.count(v); }},
      {"synthetic_spread",
       [&](const Field& f, std::string_view v) { c.dataset.spread = f.real(v); }},
      {"train_images",
       [&](const Field&, std::string_view v) { c.dataset.train_images = path(v); }},
      {"train_labels",
       [&](const Field&, std::string_view v) { c.dataset.train_labels = path(v); }},
      {"test_images",
       [&](const Field&, std::string_view v) { c.dataset.test_images = path(v); }},
      {"test_labels",
       [&](const Field&, std::string_view v) { c.dataset.test_labels = path(v); }},
      {"train_limit",
       [&](const Field& f, std::string_view v) { c.dataset.train_limit = f.count(v); }},
      {"test_limit",
       [&](const Field& f, std::string_view v) { c.dataset.test_limit = f.count(v); }},
      {"threshold", [&](const Field& f, std::string_view v) { c.threshold = f.real(v); }},
      {"out", [&](const Field&, std::string_view v) { c.output = path(v); }},
      {"verbosity",
       [&](const Field& f, std::string_view v) {
         c.verbosity = static_cast<int>(f.count(v));
       }},
  };

  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  for (std::string raw; std::getline(in, raw);) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(line_no) +
                            ": expected 'key = value', got '" + std::string(line) + "'",
                        line_no, "");
    }
    const std::string key{trim(line.substr(0, eq))};
    const std::string_view value = trim(line.substr(eq + 1));
    const Field field{line_no, key};
    const auto it = setters.find(key);
    if (it == setters.end()) field.fail("unknown key");
    if (value.empty()) field.fail("missing value");
    it->second(field, value);
  }
  c.validate();
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string(), 0, "");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), path.parent_path());
}

}  // namespace sifl
