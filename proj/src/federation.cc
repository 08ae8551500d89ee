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

#include "sifl/federation.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <map>
#include <string>
#include <thread>
#include <utility>

#include "sifl/error.h"
#include "sifl/kernels.h"
#include "sifl/rng.h"

namespace sifl {
namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

void check_aggregate(const Message& msg, std::uint32_t t, std::size_t dim) {
  if (msg.kind != MessageKind::kAggregate) {
    throw ProtocolError("server: expected AGGREGATE, got " +
                        std::string(kind_name(msg.kind)));
  }
  if (msg.round != t) {
    throw ProtocolError("server: aggregate for round " +
                        std::to_string(msg.round) + " during round " +
                        std::to_string(t));
  }
  if (msg.payload.size() != dim + 1) {
    throw ProtocolError("server: aggregate has " +
                        std::to_string(msg.payload.size()) +
                        " values, expected " + std::to_string(dim + 1));
  }
}

}  // namespace

std::string_view mode_name(Mode mode) {
  switch (mode) {
    case Mode::kPlain:
      return "plain";
    case Mode::kSifl:
      return "sifl";
    case Mode::kDual:
      return "dual";
  }
  return "?";
}

Mode parse_mode(std::string_view name) {
  if (name == "plain") return Mode::kPlain;
  if (name == "sifl") return Mode::kSifl;
  if (name == "dual") return Mode::kDual;
  throw InvalidArgument("mode: expected plain|sifl|dual, got '" +
                        std::string(name) + "'");
}

bool RoundRecord::same_outcome(const RoundRecord& o) const {
  return round == o.round && mode == o.mode && train_loss == o.train_loss &&
         test_accuracy == o.test_accuracy &&
         equivalence_rel_err == o.equivalence_rel_err;
}

std::uint64_t client_shuffle_seed(std::uint64_t run_seed, std::uint32_t round,
                                  std::uint16_t id) {
  return derive_seed(run_seed, {kShuffleStream, round, id});
}

Client::Client(ClientState state, ModelSpec model, Hyperparams hyper, Mode mode,
               std::uint64_t run_seed)
    : state_(std::move(state)),
      model_(std::move(model)),
      hyper_(hyper),
      mode_(mode),
      run_seed_(run_seed) {
  if (mode_ == Mode::kDual) throw InvalidArgument("Client: mode must be plain or sifl");
  if (state_.id == 0) throw InvalidArgument("Client: ids start at 1");
  if (state_.data.size() == 0) {
    throw InvalidArgument("Client " + std::to_string(state_.id) + ": empty dataset");
  }
}

void Client::install_keys(std::shared_ptr<const KeySet> keys) {
  keys_ = std::move(keys);
}

Message Client::handle_global(const Message& global) const {
  if (global.kind != MessageKind::kGlobal) {
    throw ProtocolError("client " + std::to_string(state_.id) +
                        ": expected GLOBAL, got " +
                        std::string(kind_name(global.kind)));
  }
  const std::uint64_t seed = client_shuffle_seed(run_seed_, global.round, state_.id);
  if (mode_ == Mode::kSifl) {
    if (!keys_) {
      throw ProtocolError("client " + std::to_string(state_.id) +
                          ": GLOBAL before KEYSET");
    }
    const auto result =
        client_update(model_, *keys_, EncryptedParamVector{global.payload, global.round},
                      state_.data, hyper_, seed);
    return make_update(global.round, state_.id, state_.data.size(),
                       result.train_loss, result.params.values);
  }
  const auto result =
      client_update(model_, ParamVector{global.payload}, state_.data, hyper_, seed);
  return make_update(global.round, state_.id, state_.data.size(),
                     result.train_loss, result.params.values);
}

InProcessLink::InProcessLink(std::vector<Client> clients, std::size_t max_threads)
    : clients_(std::move(clients)),
      aggregator_(clients_.size()),
      max_threads_(max_threads) {
  std::sort(clients_.begin(), clients_.end(),
            [](const Client& a, const Client& b) { return a.id() < b.id(); });
}

void InProcessLink::handshake(std::shared_ptr<const KeySet> keys) {
  for (Client& c : clients_) c.install_keys(keys);
}

Message InProcessLink::exchange(const Message& global) {
  const std::size_t n = clients_.size();
  std::vector<std::optional<Message>> updates(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < n;) {
      if (silent_.contains(clients_[i].id())) continue;
      try {
        updates[i] = clients_[i].handle_global(global);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::size_t threads = max_threads_ ? max_threads_ : std::thread::hardware_concurrency();
  threads = std::clamp<std::size_t>(threads, 1, n);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t k = 0; k < threads; ++k) pool.emplace_back(worker);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  aggregator_.begin_round(global.round);
  for (const auto& u : updates) {
    if (!u) continue;
    if (observer_) observer_(*u);
    aggregator_.accept(*u);
  }
  return aggregator_.finish();
}

Server::Server(ModelSpec model, Mode mode, std::shared_ptr<const KeySet> keys,
               Dataset test, std::uint64_t randomness_seed,
               double randomness_scale)
    : model_(std::move(model)),
      mode_(mode),
      keys_(std::move(keys)),
      test_(std::move(test)),
      randomness_(randomness_seed, randomness_scale) {
  if (mode_ == Mode::kDual) throw InvalidArgument("Server: mode must be plain or sifl");
  if ((mode_ == Mode::kSifl) != static_cast<bool>(keys_)) {
    throw InvalidArgument("Server: keys are required in sifl mode only");
  }
  if (keys_ && keys_->plain_dim() != model_.param_count()) {
    throw DimensionError("Server: key set covers " +
                         std::to_string(keys_->plain_dim()) +
                         " parameters, model has " +
                         std::to_string(model_.param_count()));
  }
  if (test_.size() == 0) throw InvalidArgument("Server: empty test set");
}

RoundOutcome Server::round(std::uint32_t t, const ParamVector& w,
                           ServerLink& link) {
  if (w.size() != model_.param_count()) {
    throw DimensionError("Server: global model has the wrong length");
  }
  RoundOutcome out;
  out.record.round = t;
  out.record.mode = mode_;
  Message global{MessageKind::kGlobal, t, 0, {}, {}};

  if (mode_ == Mode::kSifl) {
    const auto start = Clock::now();
    out.randomness = fresh_randomness(*keys_, t, randomness_);
    global.payload = encrypt(*keys_, w, out.randomness).values;
    out.record.t_encrypt_ms = ms_since(start);
  } else {
    global.payload = w.values;
  }

  const auto train_start = Clock::now();
  const Message agg = link.exchange(global);
  out.record.t_train_ms = ms_since(train_start);

  const std::size_t dim = mode_ == Mode::kSifl ? keys_->immersed_dim()
                                                : model_.param_count();
  check_aggregate(agg, t, dim);
  out.record.train_loss = agg.payload[0];
  std::vector<double> params(agg.payload.begin() + 1, agg.payload.end());

  if (mode_ == Mode::kSifl) {
    out.aggregate = EncryptedParamVector{std::move(params), t};
    const auto start = Clock::now();
    out.next = decrypt(*keys_, out.aggregate);
    out.record.t_decrypt_ms = ms_since(start);
  } else {
    out.next = ParamVector{std::move(params)};
  }
  out.record.test_accuracy = evaluate(model_, out.next.values, test_).accuracy;
  return out;
}

LinkFactory in_process_links(std::size_t max_threads) {
  return [max_threads](Mode mode, const TrainingConfig& config,
                       const FederatedData& data) -> std::unique_ptr<ServerLink> {
    std::vector<Client> clients;
    for (const ClientState& c : data.clients) {
      clients.emplace_back(c, config.model, config.hyper, mode, config.seed);
    }
    return std::make_unique<InProcessLink>(std::move(clients), max_threads);
  };
}

KeySet make_keyset(const TrainingConfig& config) {
  const auto blocks = split_blocks(config.model.param_count(), config.block_max);
  return generate_keyset(blocks, config.expansion,
                         derive_seed(config.seed, {kKeyStream}));
}

double relative_error(std::span<const double> reference,
                      std::span<const double> candidate) {
  if (reference.size() != candidate.size()) {
    throw DimensionError("relative_error: length mismatch");
  }
  std::vector<double> diff(candidate.begin(), candidate.end());
  kernels::axpy(-1.0, reference, diff);
  return kernels::norm2(diff) / (1.0 + kernels::norm2(reference));
}

TrainingResult run_training(const TrainingConfig& config,
                            const FederatedData& data, const LinkFactory& links,
                            std::ostream* log) {
  config.hyper.validate();
  if (data.clients.empty()) throw InvalidArgument("run_training: no clients");
  const bool run_plain = config.mode != Mode::kSifl;
  const bool run_sifl = config.mode != Mode::kPlain;
  const bool dual = run_plain && run_sifl;

  TrainingResult result;
  if (run_sifl) result.keys = std::make_shared<const KeySet>(make_keyset(config));

  const std::uint64_t randomness_seed = derive_seed(config.seed, {kRandomnessStream});
  std::unique_ptr<ServerLink> plain_link, sifl_link;
  std::optional<Server> plain_server, sifl_server;
  if (run_plain) {
    plain_server.emplace(config.model, Mode::kPlain, nullptr, data.test,
                         randomness_seed, config.randomness_scale);
    plain_link = links(Mode::kPlain, config, data);
    plain_link->handshake(nullptr);
  }
  if (run_sifl) {
    sifl_server.emplace(config.model, Mode::kSifl, result.keys, data.test,
                        randomness_seed, config.randomness_scale);
    sifl_link = links(Mode::kSifl, config, data);
    sifl_link->handshake(result.keys);
  }

  // Per-client local models for the verbosity-2 diagnostic (simulator only).
  std::map<std::uint16_t, std::vector<double>> plain_locals, sifl_locals;
  if (dual && config.verbosity >= 2 && log != nullptr) {
    auto* p = dynamic_cast<InProcessLink*>(plain_link.get());
    auto* s = dynamic_cast<InProcessLink*>(sifl_link.get());
    if (p != nullptr && s != nullptr) {
      p->observe([&](const Message& m) {
        plain_locals[m.client_id].assign(m.payload.begin() + 2, m.payload.end());
      });
      s->observe([&](const Message& m) {
        sifl_locals[m.client_id].assign(m.payload.begin() + 2, m.payload.end());
      });
    }
  }

  const ParamVector w0 = init_params(config.model, config.seed);
  ParamVector w_plain = w0;
  ParamVector w_sifl = w0;
  for (std::uint32_t t = 0; t < config.hyper.rounds; ++t) {
    std::optional<RoundOutcome> plain_out, sifl_out;
    if (run_plain) {
      plain_out = plain_server->round(t, w_plain, *plain_link);
      w_plain = plain_out->next;
      result.plain_trace.push_back(w_plain);
    }
    if (run_sifl) {
      sifl_out = sifl_server->round(t, w_sifl, *sifl_link);
      w_sifl = sifl_out->next;
      result.sifl_trace.push_back(sifl_out->aggregate);
    }
    if (dual) {
      sifl_out->record.equivalence_rel_err = relative_error(w_plain.values, w_sifl.values);
    }
    if (plain_out) result.records.push_back(plain_out->record);
    if (sifl_out) result.records.push_back(sifl_out->record);

    if (log != nullptr && config.verbosity >= 1) {
      for (const RoundRecord* r :
           {plain_out ? &plain_out->record : nullptr,
            sifl_out ? &sifl_out->record : nullptr}) {
        if (r == nullptr) continue;
        *log << "round " << r->round << " " << mode_name(r->mode)
             << " loss=" << r->train_loss << " acc=" << r->test_accuracy;
        if (r->equivalence_rel_err) *log << " rel_err=" << *r->equivalence_rel_err;
        *log << "\n";
      }
    }
    for (const auto& [id, local] : plain_locals) {
      const auto it = sifl_locals.find(id);
      if (it == sifl_locals.end()) continue;
      const EncryptedParamVector expected =
          encrypt(*result.keys, ParamVector{local}, sifl_out->randomness);
      std::vector<double> diff = it->second;
      kernels::axpy(-1.0, expected.values, diff);
      *log << "local-model round=" << t << " client=" << id
           << " norm_encrypted=" << kernels::norm2(it->second)
           << " norm_expected=" << kernels::norm2(expected.values)
           << " diff_norm=" << kernels::norm2(diff)
           << " rel_err=" << relative_error(expected.values, it->second) << "\n";
    }
    plain_locals.clear();
    sifl_locals.clear();
  }
  if (plain_link) plain_link->shutdown();
  if (sifl_link) sifl_link->shutdown();
  result.final_params = run_sifl ? w_sifl : w_plain;
  return result;
}

}  // namespace sifl
