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

#ifndef SIFL_FEDERATION_H_
#define SIFL_FEDERATION_H_

// Server, clients and the round loop.
//
// Per global round t the server draws fresh kernel randomness R_t, broadcasts
// encrypt(w_t, R_t), every client runs K local epochs of the target SGD, the
// aggregator averages the encrypted results weighted by dataset size, and the
// server decrypts the aggregate to obtain w_{t+1}. Plain mode runs the same
// loop without encryption (standard FedAvg).
//
// Transports implement ServerLink; the in-process simulator and the socket
// transport produce identical records for the same configuration.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <ostream>
#include <set>
#include <string_view>
#include <vector>

#include "sifl/aggregator.h"
#include "sifl/immersion_keys.h"
#include "sifl/learner.h"
#include "sifl/model.h"
#include "sifl/wire.h"

namespace sifl {

enum class Mode { kPlain, kSifl, kDual };

std::string_view mode_name(Mode mode);
Mode parse_mode(std::string_view name);

struct ClientState {
  std::uint16_t id = 0;  // 1-based
  Dataset data;
};

struct RoundRecord {
  std::uint32_t round = 0;
  Mode mode = Mode::kPlain;
  double train_loss = 0.0;
  double test_accuracy = 0.0;
  double t_encrypt_ms = 0.0;
  double t_decrypt_ms = 0.0;
  double t_train_ms = 0.0;
  std::optional<double> equivalence_rel_err;

  // Equality on every field except the timings.
  bool same_outcome(const RoundRecord& other) const;
};

// Seed of the mini-batch shuffle of client `id` in round `round`.
std::uint64_t client_shuffle_seed(std::uint64_t run_seed, std::uint32_t round,
                                  std::uint16_t id);

// One participant. Holds its own data; never sees other clients' updates.
class Client {
 public:
  Client(ClientState state, ModelSpec model, Hyperparams hyper, Mode mode,
         std::uint64_t run_seed);

  std::uint16_t id() const { return state_.id; }
  std::size_t dataset_size() const { return state_.data.size(); }

  void install_keys(std::shared_ptr<const KeySet> keys);
  // GLOBAL in, UPDATE out.
  Message handle_global(const Message& global) const;

 private:
  ClientState state_;
  ModelSpec model_;
  Hyperparams hyper_;
  Mode mode_;
  std::uint64_t run_seed_;
  std::shared_ptr<const KeySet> keys_;
};

// Server side of a transport.
class ServerLink {
 public:
  virtual ~ServerLink() = default;
  // Handshake: delivers the key set to the clients (nullptr in plain mode).
  virtual void handshake(std::shared_ptr<const KeySet> keys) = 0;
  // Broadcasts a GLOBAL frame and returns the round's AGGREGATE frame.
  virtual Message exchange(const Message& global) = 0;
  virtual void shutdown() = 0;
};

// Simulator: clients and aggregator in this process, client updates computed
// concurrently on worker threads.
class InProcessLink : public ServerLink {
 public:
  InProcessLink(std::vector<Client> clients, std::size_t max_threads = 0);

  void handshake(std::shared_ptr<const KeySet> keys) override;
  Message exchange(const Message& global) override;
  void shutdown() override {}

  // Test hook: these client ids never answer.
  void silence(std::set<std::uint16_t> ids) { silent_ = std::move(ids); }
  // Called with every UPDATE before aggregation, in client id order.
  void observe(std::function<void(const Message&)> fn) { observer_ = std::move(fn); }

 private:
  std::vector<Client> clients_;
  Aggregator aggregator_;
  std::size_t max_threads_;
  std::set<std::uint16_t> silent_;
  std::function<void(const Message&)> observer_;
};

struct RoundOutcome {
  ParamVector next;
  EncryptedParamVector aggregate;  // SIFL only
  RoundRandomness randomness;      // SIFL only
  RoundRecord record;
};

// Holds the decryption key, the test set and the randomness source.
class Server {
 public:
  // `keys` must be non-null exactly when mode == kSifl.
  Server(ModelSpec model, Mode mode, std::shared_ptr<const KeySet> keys,
         Dataset test, std::uint64_t randomness_seed,
         double randomness_scale = 1.0);

  // One global round starting from the plaintext global model `w`.
  RoundOutcome round(std::uint32_t t, const ParamVector& w, ServerLink& link);

  Mode mode() const { return mode_; }
  const std::shared_ptr<const KeySet>& keys() const { return keys_; }

 private:
  ModelSpec model_;
  Mode mode_;
  std::shared_ptr<const KeySet> keys_;
  Dataset test_;
  RandomnessSource randomness_;
};

struct TrainingConfig {
  ModelSpec model{{8, 16, 3}};
  Hyperparams hyper{};
  Mode mode = Mode::kDual;
  std::size_t block_max = 256;
  std::size_t expansion = 1;
  std::uint64_t seed = 1;
  double randomness_scale = 1.0;
  int verbosity = 0;
};

struct FederatedData {
  std::vector<ClientState> clients;
  Dataset test;
};

struct TrainingResult {
  std::vector<RoundRecord> records;
  std::vector<ParamVector> plain_trace;           // w_{t+1}, plain run
  std::vector<EncryptedParamVector> sifl_trace;   // aggregated encrypted w_{t+1}
  std::shared_ptr<const KeySet> keys;
  ParamVector final_params;  // SIFL result when present, else plain
};

// Creates the transport for one trajectory (called once per mode).
using LinkFactory = std::function<std::unique_ptr<ServerLink>(
    Mode mode, const TrainingConfig& config, const FederatedData& data)>;

LinkFactory in_process_links(std::size_t max_threads = 0);

// Key set covering the model, derived from config.seed.
KeySet make_keyset(const TrainingConfig& config);

// T rounds in the configured mode. Dual mode runs the plain and SIFL
// trajectories in lockstep from the same initial model and seeds, and fills
// equivalence_rel_err = ||w_plain - w_sifl|| / (1 + ||w_plain||) on the SIFL
// record. At verbosity >= 2 dual mode also logs, per client, the distance
// between the encrypted local model and encrypt(plain local model, R_t).
TrainingResult run_training(const TrainingConfig& config,
                            const FederatedData& data,
                            const LinkFactory& links = in_process_links(),
                            std::ostream* log = nullptr);

double relative_error(std::span<const double> reference,
                      std::span<const double> candidate);

}  // namespace sifl

#endif  // SIFL_FEDERATION_H_
