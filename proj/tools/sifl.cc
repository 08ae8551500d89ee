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

// sifl: command-line driver.
//
//   sifl keygen --config C [--seed S] [--out keys.siky]
//   sifl run    --config C [--mode M] [--seed S] [--out metrics.csv]
//               [--net host:port [--role aggregator|server|client
//                                 [--client-id K]]] [--verbosity V]
//   sifl check  --config C [...]   dual run + equivalence check
//   sifl bench  --config C [...]   encryption overhead vs. training time
//
// Exit status: 0 when every invoked check passes, 1 when a check fails, 2 on
// errors. Failures print a one-line JSON summary on stdout.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11/CLI11.hpp>
#include <nlohmann/json.hpp>

#include "sifl/config.h"
#include "sifl/datasets.h"
#include "sifl/equivalence.h"
#include "sifl/error.h"
#include "sifl/federation.h"
#include "sifl/kernels.h"
#include "sifl/key_io.h"
#include "sifl/metrics.h"
#include "sifl/net.h"

namespace {

using nlohmann::json;

struct Options {
  std::string config;
  std::optional<std::string> mode;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::string> net;
  std::optional<int> verbosity;
  std::string role;
  std::uint16_t client_id = 0;
};

sifl::RunConfig resolve(const Options& o) {
  sifl::RunConfig c = o.config.empty() ? sifl::parse_config("")
                                       : sifl::load_config(o.config);
  if (const char* env = std::getenv("SIFL_SEED"); env != nullptr && *env != '\0') {
    try {
      std::size_t used = 0;
      c.seed = std::stoull(env, &used);
      if (env[used] != '\0') throw std::invalid_argument(env);
    } catch (const std::exception&) {
      throw sifl::ConfigError(std::string("SIFL_SEED: not an unsigned integer: ") + env,
                              0, "seed");
    }
  }
  if (o.seed) c.seed = *o.seed;
  if (o.mode) c.mode = sifl::parse_mode(*o.mode);
  if (o.out) c.output = *o.out;
  if (o.verbosity) c.verbosity = *o.verbosity;
  c.validate();
  return c;
}

void print(const json& j) { std::cout << j.dump() << std::endl; }

int fail(const json& summary) {
  json j = summary;
  j["status"] = "fail";
  print(j);
  return 1;
}

json timing_json(const sifl::TimingSummary& s) {
  return {{"encrypt_ms_per_round", s.encrypt_ms},
          {"decrypt_ms_per_round", s.decrypt_ms},
          {"train_ms_per_round", s.train_ms},
          {"overhead_ratio", s.overhead_ratio}};
}

// Accuracy must agree exactly between the plain and SIFL record of a round.
std::vector<std::uint32_t> accuracy_mismatches(const std::vector<sifl::RoundRecord>& rs) {
  std::vector<std::uint32_t> out;
  for (std::size_t i = 0; i + 1 < rs.size(); ++i) {
    if (rs[i].mode == sifl::Mode::kPlain && rs[i + 1].mode == sifl::Mode::kSifl &&
        rs[i].round == rs[i + 1].round && rs[i].test_accuracy != rs[i + 1].test_accuracy) {
      out.push_back(rs[i].round);
    }
  }
  return out;
}

sifl::TrainingResult train(const sifl::RunConfig& c, const sifl::LinkFactory& links) {
  const sifl::FederatedData data = sifl::load_federated_data(c);
  sifl::TrainingResult r = sifl::run_training(c.training(), data, links, &std::cerr);
  if (!c.output.empty()) sifl::write_metrics(r.records, c.output);
  return r;
}

sifl::LinkFactory links_for(const Options& o) {
  if (!o.net) return sifl::in_process_links();
  const auto ep = sifl::net::Endpoint::parse(*o.net);
  return o.role == "server" ? sifl::net::remote_links(ep) : sifl::net::socket_links(ep);
}

// Outcome of a trained run: equivalence in dual mode, success otherwise.
int report_run(const sifl::RunConfig& c, const sifl::TrainingResult& r,
               const char* command) {
  json j{{"command", command},
         {"mode", sifl::mode_name(c.mode)},
         {"rounds", c.rounds},
         {"seed", c.seed},
         {"kernels", sifl::kernels::isa_name(sifl::kernels::active_isa())}};
  if (!r.records.empty()) j["final_test_accuracy"] = r.records.back().test_accuracy;
  if (!c.output.empty()) j["metrics"] = c.output.string();
  if (c.mode != sifl::Mode::kDual) {
    j["status"] = "pass";
    print(j);
    return 0;
  }
  const auto report = sifl::check_equivalence(r.plain_trace, r.sifl_trace, *r.keys,
                                              c.threshold);
  const auto mismatched = accuracy_mismatches(r.records);
  j["equivalence"] = json::parse(report.to_json());
  j["accuracy_mismatch_rounds"] = mismatched;
  if (!report.passed || !mismatched.empty()) return fail(j);
  j["status"] = "pass";
  print(j);
  return 0;
}

int cmd_keygen(const Options& o) {
  const sifl::RunConfig c = resolve(o);
  const sifl::KeySet keys = sifl::make_keyset(c.training());
  const std::string out = o.out.value_or("keys.siky");
  sifl::write_keyset_file(out, keys);
  print({{"command", "keygen"},
         {"status", "pass"},
         {"blocks", keys.block_count()},
         {"plain_dim", keys.plain_dim()},
         {"immersed_dim", keys.immersed_dim()},
         {"seed", c.seed},
         {"out", out}});
  return 0;
}

// One node per trajectory; a dual run needs two federations (port, port + 1).
std::vector<sifl::Mode> trajectories(sifl::Mode mode) {
  if (mode == sifl::Mode::kDual) return {sifl::Mode::kPlain, sifl::Mode::kSifl};
  return {mode};
}

template <typename Body>
void run_nodes(const std::vector<sifl::Mode>& modes, Body body) {
  std::vector<std::exception_ptr> errors(modes.size());
  {
    std::vector<std::jthread> threads;
    for (std::size_t i = 0; i < modes.size(); ++i) {
      threads.emplace_back([&, i] {
        try {
          body(modes[i]);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      });
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

int cmd_role(const Options& o) {
  const sifl::RunConfig c = resolve(o);
  if (!o.net) throw sifl::ConfigError("--role requires --net host:port", 0, "net");
  const auto base = sifl::net::Endpoint::parse(*o.net);
  if (base.port == 0) throw sifl::ConfigError("--role requires a fixed port", 0, "net");

  if (o.role == "server") {
    const sifl::TrainingResult r = train(c, links_for(o));
    return report_run(c, r, "run");
  }
  if (o.role == "aggregator") {
    run_nodes(trajectories(c.mode), [&](sifl::Mode m) {
      sifl::net::Listener listener(sifl::net::trajectory_endpoint(base, c.mode, m));
      sifl::net::run_aggregator_node(listener, c.clients);
    });
    print({{"command", "run"}, {"role", "aggregator"}, {"status", "pass"}});
    return 0;
  }
  // client
  if (o.client_id < 1 || o.client_id > c.clients) {
    throw sifl::ConfigError("--client-id must be in [1, " + std::to_string(c.clients) + "]",
                            0, "client-id");
  }
  const sifl::FederatedData data = sifl::load_federated_data(c);
  const sifl::TrainingConfig t = c.training();
  run_nodes(trajectories(c.mode), [&](sifl::Mode m) {
    sifl::Client client(data.clients[o.client_id - 1], t.model, t.hyper, m, t.seed);
    sifl::net::run_client_node(sifl::net::trajectory_endpoint(base, c.mode, m), client);
  });
  print({{"command", "run"}, {"role", "client"}, {"client_id", o.client_id},
         {"status", "pass"}});
  return 0;
}

int cmd_run(const Options& o) {
  if (!o.role.empty()) return cmd_role(o);
  const sifl::RunConfig c = resolve(o);
  return report_run(c, train(c, links_for(o)), "run");
}

int cmd_check(Options o) {
  o.mode = "dual";
  const sifl::RunConfig c = resolve(o);
  return report_run(c, train(c, links_for(o)), "check");
}

int cmd_bench(const Options& o) {
  sifl::RunConfig c = resolve(o);
  if (c.mode == sifl::Mode::kPlain) c.mode = sifl::Mode::kSifl;
  const sifl::TrainingResult r = train(c, links_for(o));
  const sifl::TimingSummary s = sifl::summarize_timings(r.records);
  json j{{"command", "bench"},
         {"mode", sifl::mode_name(c.mode)},
         {"params", c.training().model.param_count()},
         {"kernels", sifl::kernels::isa_name(sifl::kernels::active_isa())},
         {"timing", timing_json(s)},
         {"overhead_limit", 0.5}};
  if (!(s.overhead_ratio <= 0.5)) return fail(j);
  j["status"] = "pass";
  print(j);
  return 0;
}

void add_common(CLI::App* sub, Options& o, bool with_net) {
  sub->add_option("--config", o.config, "Run configuration file")->check(CLI::ExistingFile);
  sub->add_option("--mode", o.mode, "plain | sifl | dual")
      ->check(CLI::IsMember({"plain", "sifl", "dual"}));
  sub->add_option("--seed", o.seed, "Root seed (overrides SIFL_SEED and the config)");
  sub->add_option("--verbosity", o.verbosity, "0..2")->check(CLI::Range(0, 2));
  if (with_net) {
    sub->add_option("--net", o.net, "Use TCP sockets on host:port (port 0 = any)");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Federated learning with immersion-based model encryption"};
  app.require_subcommand(1);
  Options o;

  auto* keygen = app.add_subcommand("keygen", "Generate and save the key set");
  add_common(keygen, o, false);
  keygen->add_option("--out", o.out, "Key file (default keys.siky)");

  auto* run = app.add_subcommand("run", "Run federated training");
  add_common(run, o, true);
  run->add_option("--out", o.out, "Metrics CSV path");
  run->add_option("--role", o.role, "Multi-process role")
      ->check(CLI::IsMember({"aggregator", "server", "client"}));
  run->add_option("--client-id", o.client_id, "1-based client id (--role client)");

  auto* check = app.add_subcommand("check", "Dual run with the equivalence check");
  add_common(check, o, true);
  check->add_option("--out", o.out, "Metrics CSV path");

  auto* bench = app.add_subcommand("bench", "Encryption overhead vs. training time");
  add_common(bench, o, true);
  bench->add_option("--out", o.out, "Metrics CSV path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*keygen) return cmd_keygen(o);
    if (*run) return cmd_run(o);
    if (*check) return cmd_check(o);
    return cmd_bench(o);
  } catch (const std::exception& e) {
    json j{{"status", "error"}, {"message", e.what()}};
    if (const auto* ce = dynamic_cast<const sifl::ConfigError*>(&e)) {
      j["type"] = "config";
      j["key"] = ce->key();
      if (ce->line() > 0) j["line"] = ce->line();
    } else if (dynamic_cast<const sifl::DatasetError*>(&e)) {
      j["type"] = "dataset";
    } else if (dynamic_cast<const sifl::ProtocolError*>(&e)) {
      j["type"] = "protocol";
    } else if (dynamic_cast<const sifl::DecodeError*>(&e)) {
      j["type"] = "decode";
    } else {
      j["type"] = "error";
    }
    print(j);
    return 2;
  }
}
