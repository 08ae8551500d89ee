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

#include "sifl/net.h"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <sys/time.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <string>
#include <utility>

#include "sifl/error.h"
#include "sifl/key_io.h"

namespace sifl::net {
namespace {

constexpr std::uint64_t kMaxPayloadBytes = std::uint64_t{8} << 30;

std::string errno_text() { return std::strerror(errno); }

timeval to_timeval(std::chrono::milliseconds ms) {
  timeval tv{};
  tv.tv_sec = static_cast<time_t>(ms.count() / 1000);
  tv.tv_usec = static_cast<suseconds_t>((ms.count() % 1000) * 1000);
  return tv;
}

addrinfo* resolve(const Endpoint& ep, bool passive) {
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  if (passive) hints.ai_flags = AI_PASSIVE;
  addrinfo* res = nullptr;
  const std::string port = std::to_string(ep.port);
  if (const int rc = ::getaddrinfo(ep.host.empty() ? nullptr : ep.host.c_str(),
                                   port.c_str(), &hints, &res);
      rc != 0) {
    throw Error("cannot resolve " + ep.str() + ": " + ::gai_strerror(rc));
  }
  return res;
}

// Address that a local peer can connect to.
Endpoint connectable(Endpoint ep) {
  if (ep.host.empty() || ep.host == "0.0.0.0") ep.host = "127.0.0.1";
  return ep;
}

std::string client_label(std::uint16_t id) { return "client " + std::to_string(id); }

}  // namespace

Endpoint Endpoint::parse(const std::string& text) {
  Endpoint ep;
  const auto colon = text.rfind(':');
  std::string port_text = text;
  if (colon != std::string::npos) {
    if (colon > 0) ep.host = text.substr(0, colon);
    port_text = text.substr(colon + 1);
  }
  try {
    std::size_t used = 0;
    const unsigned long port = std::stoul(port_text, &used);
    if (used != port_text.size() || port > 65535) throw std::out_of_range("port");
    ep.port = static_cast<std::uint16_t>(port);
  } catch (const std::exception&) {
    throw InvalidArgument("bad network address '" + text + "', expected host:port");
  }
  return ep;
}

Stream::~Stream() {
  if (fd_ >= 0) ::close(fd_);
}

Stream& Stream::operator=(Stream&& other) noexcept {
  if (this != &other) {
    if (fd_ >= 0) ::close(fd_);
    fd_ = other.release();
  }
  return *this;
}

Stream Stream::connect(const Endpoint& ep, std::chrono::milliseconds timeout) {
  const Endpoint target = connectable(ep);
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  std::string last_error;
  while (true) {
    addrinfo* res = resolve(target, false);
    for (addrinfo* ai = res; ai != nullptr; ai = ai->ai_next) {
      const int fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
      if (fd < 0) continue;
      if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) {
        ::freeaddrinfo(res);
        const int one = 1;
        ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
        return Stream(fd);
      }
      last_error = errno_text();
      ::close(fd);
    }
    ::freeaddrinfo(res);
    if (std::chrono::steady_clock::now() >= deadline) {
      throw Error("cannot connect to " + target.str() + ": " + last_error);
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
  }
}

void Stream::set_receive_timeout(std::chrono::milliseconds timeout) {
  const timeval tv = to_timeval(timeout);
  ::setsockopt(fd_, SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof(tv));
}

void Stream::send_frame(const std::vector<std::uint8_t>& frame) {
  std::size_t sent = 0;
  while (sent < frame.size()) {
    const ssize_t n =
        ::send(fd_, frame.data() + sent, frame.size() - sent, MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw ProtocolError("send failed: " + errno_text());
    }
    sent += static_cast<std::size_t>(n);
  }
}

void Stream::send(const Message& msg) { send_frame(encode_message(msg)); }

void Stream::read_exact(std::uint8_t* dst, std::size_t n) {
  std::size_t got = 0;
  while (got < n) {
    const ssize_t r = ::recv(fd_, dst + got, n - got, 0);
    if (r == 0) throw ProtocolError("peer closed the connection");
    if (r < 0) {
      if (errno == EINTR) continue;
      if (errno == EAGAIN || errno == EWOULDBLOCK) {
        throw ProtocolError("receive timed out");
      }
      throw ProtocolError("receive failed: " + errno_text());
    }
    got += static_cast<std::size_t>(r);
  }
}

std::vector<std::uint8_t> Stream::receive_frame() {
  std::vector<std::uint8_t> frame(kFrameHeaderSize);
  read_exact(frame.data(), kFrameHeaderSize);
  const FrameHeader h = decode_header(frame);
  if (h.length > kMaxPayloadBytes || h.payload_bytes() > kMaxPayloadBytes) {
    throw DecodeError("payload too large", 12);
  }
  frame.resize(kFrameHeaderSize + h.payload_bytes());
  read_exact(frame.data() + kFrameHeaderSize, h.payload_bytes());
  return frame;
}

Message Stream::receive() { return decode_message(receive_frame()); }

void Stream::shutdown() {
  if (fd_ >= 0) ::shutdown(fd_, SHUT_RDWR);
}

Listener::Listener(const Endpoint& ep) : host_(ep.host) {
  addrinfo* res = resolve(ep, true);
  fd_ = ::socket(res->ai_family, res->ai_socktype, res->ai_protocol);
  if (fd_ < 0) {
    ::freeaddrinfo(res);
    throw Error("socket: " + errno_text());
  }
  const int one = 1;
  ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
  if (::bind(fd_, res->ai_addr, res->ai_addrlen) != 0 || ::listen(fd_, 64) != 0) {
    const std::string err = errno_text();
    ::freeaddrinfo(res);
    ::close(fd_);
    fd_ = -1;
    throw Error("cannot listen on " + ep.str() + ": " + err);
  }
  ::freeaddrinfo(res);
  sockaddr_in addr{};
  socklen_t len = sizeof(addr);
  ::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
}

Listener::~Listener() { close(); }

Stream Listener::accept() {
  while (true) {
    const int fd = ::accept(fd_, nullptr, nullptr);
    if (fd >= 0) {
      const int one = 1;
      ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
      return Stream(fd);
    }
    if (errno == EINTR) continue;
    if (errno == EAGAIN || errno == EWOULDBLOCK) {
      throw ProtocolError("timed out waiting for connections");
    }
    throw ProtocolError("accept failed: " + errno_text());
  }
}

void Listener::set_accept_timeout(std::chrono::milliseconds timeout) {
  const timeval tv = to_timeval(timeout);
  ::setsockopt(fd_, SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof(tv));
}

void Listener::close() {
  if (fd_ >= 0) {
    ::shutdown(fd_, SHUT_RDWR);
    ::close(fd_);
    fd_ = -1;
  }
}

void run_aggregator_node(Listener& listener, std::size_t num_clients,
                         const NodeOptions& options) {
  Aggregator aggregator(num_clients);
  Stream server;
  std::vector<Stream> clients(num_clients + 1);  // index = client id
  std::size_t connected = 0;
  listener.set_accept_timeout(options.receive_timeout);
  while (!server.valid() || connected < num_clients) {
    Stream s;
    try {
      s = listener.accept();
    } catch (const ProtocolError& e) {
      for (std::size_t id = 1; id <= num_clients; ++id) {
        if (!clients[id].valid()) {
          throw ProtocolError(std::string(e.what()) + "; " +
                              client_label(static_cast<std::uint16_t>(id)) +
                              " never connected");
        }
      }
      throw;
    }
    s.set_receive_timeout(options.receive_timeout);
    const Message hello = s.receive();
    if (hello.kind != MessageKind::kHello) {
      throw ProtocolError("aggregator: expected HELLO, got " +
                          std::string(kind_name(hello.kind)));
    }
    if (hello.client_id == 0) {
      if (server.valid()) throw ProtocolError("aggregator: second server connection");
      if (hello.payload.size() != 1 ||
          hello.payload[0] != static_cast<double>(num_clients)) {
        throw ProtocolError("aggregator: server expects a different client count");
      }
      server = std::move(s);
    } else {
      const std::uint16_t id = hello.client_id;
      if (id > num_clients) {
        throw ProtocolError("aggregator: unknown " + client_label(id));
      }
      if (clients[id].valid()) {
        throw ProtocolError("aggregator: duplicate " + client_label(id));
      }
      clients[id] = std::move(s);
      ++connected;
    }
  }

  while (true) {
    const std::vector<std::uint8_t> frame = server.receive_frame();
    const FrameHeader h = decode_header(std::span(frame).first(kFrameHeaderSize));
    switch (h.kind) {
      case MessageKind::kKeyset:
        for (std::size_t id = 1; id <= num_clients; ++id) clients[id].send_frame(frame);
        break;
      case MessageKind::kGlobal: {
        for (std::size_t id = 1; id <= num_clients; ++id) clients[id].send_frame(frame);
        aggregator.begin_round(h.round);
        for (std::size_t id = 1; id <= num_clients; ++id) {
          Message update;
          try {
            update = clients[id].receive();
          } catch (const ProtocolError& e) {
            throw ProtocolError("aggregator: missing update from " +
                                client_label(static_cast<std::uint16_t>(id)) +
                                " in round " + std::to_string(h.round) + " (" +
                                e.what() + ")");
          }
          if (update.client_id != id) {
            throw ProtocolError("aggregator: connection of " +
                                client_label(static_cast<std::uint16_t>(id)) +
                                " sent an update for " + client_label(update.client_id));
          }
          aggregator.accept(update);
        }
        server.send(aggregator.finish());
        break;
      }
      case MessageKind::kDone:
        for (std::size_t id = 1; id <= num_clients; ++id) clients[id].send_frame(frame);
        return;
      default:
        throw ProtocolError("aggregator: unexpected " +
                            std::string(kind_name(h.kind)) + " from server");
    }
  }
}

void run_client_node(const Endpoint& aggregator, Client& client,
                     const NodeOptions& options) {
  Stream s = Stream::connect(aggregator);
  s.set_receive_timeout(options.receive_timeout);
  s.send(Message{MessageKind::kHello, 0, client.id(), {}, {}});
  while (true) {
    const Message msg = s.receive();
    switch (msg.kind) {
      case MessageKind::kKeyset:
        client.install_keys(std::make_shared<const KeySet>(deserialize_keyset(msg.bytes)));
        break;
      case MessageKind::kGlobal:
        s.send(client.handle_global(msg));
        break;
      case MessageKind::kDone:
        return;
      default:
        throw ProtocolError(client_label(client.id()) + ": unexpected " +
                            std::string(kind_name(msg.kind)));
    }
  }
}

SocketServerLink::SocketServerLink(const Endpoint& aggregator,
                                   std::size_t num_clients,
                                   const NodeOptions& options)
    : stream_(Stream::connect(aggregator)) {
  stream_.set_receive_timeout(options.receive_timeout);
  stream_.send(Message{MessageKind::kHello, 0, 0,
                       {static_cast<double>(num_clients)}, {}});
}

void SocketServerLink::handshake(std::shared_ptr<const KeySet> keys) {
  if (!keys) return;
  stream_.send(Message{MessageKind::kKeyset, 0, 0, {}, serialize_keyset(*keys)});
}

Message SocketServerLink::exchange(const Message& global) {
  stream_.send(global);
  return stream_.receive();
}

void SocketServerLink::shutdown() {
  if (done_) return;
  done_ = true;
  stream_.send(Message{MessageKind::kDone, 0, 0, {}, {}});
}

LocalSocketFederation::LocalSocketFederation(const Endpoint& listen,
                                             std::vector<Client> clients,
                                             const NodeOptions& options)
    : listener_(std::make_unique<Listener>(listen)) {
  const Endpoint ep = connectable(listener_->endpoint());
  const std::size_t n = clients.size();
  errors_.resize(n + 1);
  for (Client& c : clients) clients_.push_back(std::make_unique<Client>(std::move(c)));
  threads_.emplace_back([this, n, options] {
    try {
      run_aggregator_node(*listener_, n, options);
    } catch (...) {
      errors_[0] = std::current_exception();
    }
  });
  for (std::size_t i = 0; i < n; ++i) {
    threads_.emplace_back([this, i, ep, options] {
      try {
        run_client_node(ep, *clients_[i], options);
      } catch (...) {
        errors_[i + 1] = std::current_exception();
      }
    });
  }
  try {
    link_ = std::make_unique<SocketServerLink>(ep, n, options);
  } catch (...) {
    join_and_rethrow();
    throw;
  }
}

LocalSocketFederation::~LocalSocketFederation() {
  link_.reset();
  if (listener_) listener_->close();
  threads_.clear();
}

void LocalSocketFederation::join_and_rethrow() {
  link_.reset();
  listener_->close();
  threads_.clear();  // jthread joins
  for (const auto& e : errors_) {
    if (e) std::rethrow_exception(e);
  }
}

void LocalSocketFederation::handshake(std::shared_ptr<const KeySet> keys) {
  try {
    link_->handshake(std::move(keys));
  } catch (...) {
    join_and_rethrow();
    throw;
  }
}

Message LocalSocketFederation::exchange(const Message& global) {
  if (!link_) throw ProtocolError("socket federation is closed");
  try {
    return link_->exchange(global);
  } catch (...) {
    join_and_rethrow();
    throw;
  }
}

void LocalSocketFederation::shutdown() {
  if (!link_) return;
  link_->shutdown();
  join_and_rethrow();
}

LinkFactory socket_links(const Endpoint& listen, const NodeOptions& options) {
  return [listen, options](Mode mode, const TrainingConfig& config,
                           const FederatedData& data) -> std::unique_ptr<ServerLink> {
    std::vector<Client> clients;
    for (const ClientState& c : data.clients) {
      clients.emplace_back(c, config.model, config.hyper, mode, config.seed);
    }
    return std::make_unique<LocalSocketFederation>(
        trajectory_endpoint(listen, config.mode, mode), std::move(clients), options);
  };
}

Endpoint trajectory_endpoint(const Endpoint& base, Mode run_mode, Mode trajectory) {
  Endpoint ep = base;
  if (ep.port != 0 && run_mode == Mode::kDual && trajectory == Mode::kSifl) ++ep.port;
  return ep;
}

LinkFactory remote_links(const Endpoint& aggregator, const NodeOptions& options) {
  return [aggregator, options](Mode mode, const TrainingConfig& config,
                               const FederatedData& data) -> std::unique_ptr<ServerLink> {
    return std::make_unique<SocketServerLink>(
        trajectory_endpoint(aggregator, config.mode, mode), data.clients.size(), options);
  };
}

}  // namespace sifl::net
