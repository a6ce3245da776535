// Copyright 2026 The WorldGauge Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "worldgauge/bridge/server.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cmath>
#include <cstring>
#include <istream>
#include <limits>
#include <ostream>
#include <thread>

#include <spdlog/spdlog.h>

#include "worldgauge/core/errors.hpp"

namespace worldgauge::bridge {

namespace {

ErrorInfo make_error(std::string_view code, std::string message) {
  return ErrorInfo{std::string(code), std::move(message)};
}

// Validates token ids against the alphabet; returns an error message or "".
std::string check_ids(const automata::Alphabet& alphabet, const TokenSeq& seq,
                      const char* field) {
  for (TokenId t : seq) {
    if (!alphabet.contains(t)) {
      return std::string("token id ") + std::to_string(t) + " in '" + field +
             "' is outside the alphabet";
    }
  }
  return {};
}

}  // namespace

BridgeServer::BridgeServer(genmodel::ModelHandle model, genmodel::JudgeHandle judge)
    : model_(std::move(model)), judge_(std::move(judge)), alphabet_(nullptr) {
  if (!model_ && !judge_) throw InputError("a bridge server needs a model or a judge");
  alphabet_ = model_ ? &model_->alphabet() : &judge_->alphabet();
  if (model_ && judge_ && !(model_->alphabet() == judge_->alphabet())) {
    throw InputError("model and judge alphabets differ");
  }
}

std::vector<std::string> BridgeServer::capabilities() const {
  std::vector<std::string> caps;
  if (model_) caps.emplace_back(kCapNextDist);
  if (judge_) caps.emplace_back(kCapAccepts);
  return caps;
}

BatchResult BridgeServer::answer_item(const BatchItem& item) const {
  try {
    if (const auto* r = std::get_if<NextDistRequest>(&item)) {
      if (!model_) return make_error(codes::kCapability, "next_distribution is not offered");
      if (auto msg = check_ids(*alphabet_, r->prefix, "prefix"); !msg.empty()) {
        return make_error(codes::kBadRequest, msg);
      }
      const auto dist = model_->next_dist(r->prefix);
      NextDistResponse out;
      out.logprobs.reserve(dist.size());
      for (double p : dist.probabilities()) {
        out.logprobs.push_back(p > 0.0 ? std::log(p) : -std::numeric_limits<double>::infinity());
      }
      return out;
    }
    const auto& r = std::get<AcceptsRequest>(item);
    if (!judge_) return make_error(codes::kCapability, "accept_judgment is not offered");
    if (auto msg = check_ids(*alphabet_, r.prefix, "prefix"); !msg.empty()) {
      return make_error(codes::kBadRequest, msg);
    }
    if (auto msg = check_ids(*alphabet_, r.suffix, "suffix"); !msg.empty()) {
      return make_error(codes::kBadRequest, msg);
    }
    if (r.suffix.empty()) return make_error(codes::kBadRequest, "suffix must be non-empty");
    return AcceptsResponse{judge_->accepts(r.prefix, r.suffix)};
  } catch (const InputError& e) {
    return make_error(codes::kBadRequest, e.what());
  } catch (const std::exception& e) {
    return make_error(codes::kInternal, e.what());
  }
}

Response BridgeServer::answer(const Request& request, Connection& connection) const {
  if (const auto* hello = std::get_if<Hello>(&request)) {
    if (hello->version != kProtocolVersion) {
      return make_error(codes::kVersion, "server speaks " + std::string(kProtocolVersion) +
                                             ", client asked for " + hello->version);
    }
    if (hello->alphabet != alphabet_->names()) {
      return make_error(codes::kAlphabet, "alphabet differs from the served model's");
    }
    connection.greeted = true;
    return HelloAck{std::string(kProtocolVersion), capabilities(), alphabet_->names()};
  }
  if (std::holds_alternative<Bye>(request)) {
    connection.closed = true;
    return ByeAck{};
  }
  if (!connection.greeted) return make_error(codes::kBadRequest, "hello must come first");

  if (const auto* batch = std::get_if<BatchRequest>(&request)) {
    BatchResponse out;
    out.results.reserve(batch->items.size());
    for (const auto& item : batch->items) out.results.push_back(answer_item(item));
    return out;
  }
  BatchItem item = std::holds_alternative<NextDistRequest>(request)
                       ? BatchItem{std::get<NextDistRequest>(request)}
                       : BatchItem{std::get<AcceptsRequest>(request)};
  return std::visit([](auto&& r) -> Response { return r; }, answer_item(item));
}

std::string BridgeServer::handle_line(std::string_view line, Connection& connection) const {
  ResponseEnvelope reply;
  try {
    const auto request = decode_request(line);
    reply.id = request.id;
    reply.body = answer(request.body, connection);
  } catch (const MessageError& e) {
    reply.id = e.id().value_or(0);
    reply.body = make_error(e.code(), e.what());
  }
  return encode(reply);
}

void BridgeServer::serve(std::istream& in, std::ostream& out) const {
  Connection connection;
  std::string line;
  while (!connection.closed && std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    out << handle_line(line, connection) << '\n';
    out.flush();
  }
}

void BridgeServer::serve_tcp(std::uint16_t port, std::size_t max_connections,
                             const std::function<void(std::uint16_t)>& on_listen,
                             const std::atomic<bool>* stop) const {
  const int fd = ::socket(AF_INET, SOCK_STREAM | SOCK_CLOEXEC, 0);
  if (fd < 0) throw TransportError(std::string("socket: ") + std::strerror(errno), false);
  int one = 1;
  ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  addr.sin_port = htons(port);
  if (::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0 || ::listen(fd, 16) != 0) {
    const std::string msg = std::strerror(errno);
    ::close(fd);
    throw TransportError("cannot listen on port " + std::to_string(port) + ": " + msg, false);
  }
  socklen_t len = sizeof addr;
  ::getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len);
  if (on_listen) on_listen(ntohs(addr.sin_port));

  std::vector<std::thread> workers;
  std::size_t accepted = 0;
  while (max_connections == 0 || accepted < max_connections) {
    if (stop != nullptr && stop->load()) break;
    pollfd pfd{fd, POLLIN, 0};
    const int rc = ::poll(&pfd, 1, 100);
    if (rc <= 0) continue;
    const int conn = ::accept4(fd, nullptr, nullptr, SOCK_CLOEXEC);
    if (conn < 0) continue;
    ++accepted;
    workers.emplace_back([this, conn] {
      Connection connection;
      std::string buffer;
      char chunk[65536];
      bool open = true;
      while (open && !connection.closed) {
        const ssize_t n = ::read(conn, chunk, sizeof chunk);
        if (n <= 0) {
          if (n < 0 && errno == EINTR) continue;
          break;
        }
        buffer.append(chunk, static_cast<std::size_t>(n));
        std::size_t nl;
        while (!connection.closed && (nl = buffer.find('\n')) != std::string::npos) {
          std::string line = buffer.substr(0, nl);
          buffer.erase(0, nl + 1);
          if (!line.empty() && line.back() == '\r') line.pop_back();
          if (line.find_first_not_of(" \t") == std::string::npos) continue;
          std::string reply = handle_line(line, connection) + "\n";
          std::size_t off = 0;
          while (off < reply.size()) {
            const ssize_t w = ::send(conn, reply.data() + off, reply.size() - off, MSG_NOSIGNAL);
            if (w <= 0) {
              if (w < 0 && errno == EINTR) continue;
              open = false;
              break;
            }
            off += static_cast<std::size_t>(w);
          }
          if (!open) break;
        }
      }
      ::close(conn);
    });
  }
  for (auto& t : workers) t.join();
  ::close(fd);
  spdlog::debug("bridge server stopped after {} connections", accepted);
}

std::unique_ptr<LoopbackTransport> make_loopback(std::shared_ptr<const BridgeServer> server) {
  auto connection = std::make_shared<BridgeServer::Connection>();
  return std::make_unique<LoopbackTransport>(
      [server = std::move(server), connection](std::string_view line) {
        return std::vector<std::string>{server->handle_line(line, *connection)};
      });
}

TransportFactory loopback_factory(std::shared_ptr<const BridgeServer> server) {
  return [server = std::move(server)]() -> std::unique_ptr<Transport> {
    return make_loopback(server);
  };
}

}  // namespace worldgauge::bridge
