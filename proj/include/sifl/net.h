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

#ifndef SIFL_NET_H_
#define SIFL_NET_H_

// TCP transport. Topology: the aggregator owns the single listener. Clients
// and the server connect to it and introduce themselves with HELLO (client id
// 0 marks the server, whose HELLO payload is [N_c]). Server-to-client frames
// (KEYSET, GLOBAL, DONE) are relayed verbatim; the aggregator never decodes a
// KEYSET payload. No TLS or authentication: the channel is assumed secure.

#include <chrono>
#include <cstdint>
#include <exception>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include "sifl/federation.h"
#include "sifl/wire.h"

namespace sifl::net {

struct Endpoint {
  std::string host = "127.0.0.1";
  std::uint16_t port = 0;

  // "host:port" or ":port" or "port".
  static Endpoint parse(const std::string& text);
  std::string str() const { return host + ":" + std::to_string(port); }
};

// Connected stream socket; moves only.
class Stream {
 public:
  Stream() = default;
  explicit Stream(int fd) : fd_(fd) {}
  ~Stream();
  Stream(Stream&& other) noexcept : fd_(other.release()) {}
  Stream& operator=(Stream&& other) noexcept;
  Stream(const Stream&) = delete;
  Stream& operator=(const Stream&) = delete;

  // Retries until `timeout` for the peer to start listening.
  static Stream connect(const Endpoint& ep,
                        std::chrono::milliseconds timeout = std::chrono::seconds(10));

  bool valid() const { return fd_ >= 0; }
  void set_receive_timeout(std::chrono::milliseconds timeout);

  void send(const Message& msg);
  void send_frame(const std::vector<std::uint8_t>& frame);
  // Reads one full frame. Throws ProtocolError on EOF/timeout and DecodeError
  // on a malformed frame.
  std::vector<std::uint8_t> receive_frame();
  Message receive();

  // Unblocks pending reads in other threads.
  void shutdown();

 private:
  int release() {
    const int fd = fd_;
    fd_ = -1;
    return fd;
  }
  void read_exact(std::uint8_t* dst, std::size_t n);

  int fd_ = -1;
};

class Listener {
 public:
  explicit Listener(const Endpoint& ep);
  ~Listener();
  Listener(const Listener&) = delete;
  Listener& operator=(const Listener&) = delete;

  std::uint16_t port() const { return port_; }
  Endpoint endpoint() const { return {host_, port_}; }
  Stream accept();
  void set_accept_timeout(std::chrono::milliseconds timeout);
  void close();

 private:
  int fd_ = -1;
  std::string host_;
  std::uint16_t port_ = 0;
};

struct NodeOptions {
  // Per-read deadline; a client that stays silent longer is reported.
  std::chrono::milliseconds receive_timeout = std::chrono::minutes(10);
};

// Aggregator process body: waits for the server and `num_clients` clients,
// relays server frames, aggregates one round per GLOBAL, exits on DONE.
void run_aggregator_node(Listener& listener, std::size_t num_clients,
                         const NodeOptions& options = {});

// Client process body: HELLO, then serves KEYSET/GLOBAL until DONE.
void run_client_node(const Endpoint& aggregator, Client& client,
                     const NodeOptions& options = {});

// Server-side link over a connection to the aggregator.
class SocketServerLink : public ServerLink {
 public:
  SocketServerLink(const Endpoint& aggregator, std::size_t num_clients,
                   const NodeOptions& options = {});

  void handshake(std::shared_ptr<const KeySet> keys) override;
  Message exchange(const Message& global) override;
  void shutdown() override;

 private:
  Stream stream_;
  bool done_ = false;
};

// Aggregator and clients on background threads of this process, talking over
// real TCP sockets on `listen` (port 0 picks a free port).
class LocalSocketFederation : public ServerLink {
 public:
  LocalSocketFederation(const Endpoint& listen, std::vector<Client> clients,
                        const NodeOptions& options = {});
  ~LocalSocketFederation() override;

  void handshake(std::shared_ptr<const KeySet> keys) override;
  Message exchange(const Message& global) override;
  void shutdown() override;

  std::uint16_t port() const { return listener_->port(); }

 private:
  void join_and_rethrow();

  std::unique_ptr<Listener> listener_;
  std::vector<std::unique_ptr<Client>> clients_;
  std::vector<std::jthread> threads_;
  std::vector<std::exception_ptr> errors_;
  std::unique_ptr<SocketServerLink> link_;
};

// Endpoint used by one trajectory: in a dual run with a fixed port the SIFL
// trajectory uses port + 1.
Endpoint trajectory_endpoint(const Endpoint& base, Mode run_mode, Mode trajectory);

// LinkFactory running each trajectory over its own LocalSocketFederation.
LinkFactory socket_links(const Endpoint& listen, const NodeOptions& options = {});

// LinkFactory for a server process talking to separately started aggregator
// and client processes.
LinkFactory remote_links(const Endpoint& aggregator, const NodeOptions& options = {});

}  // namespace sifl::net

#endif  // SIFL_NET_H_
