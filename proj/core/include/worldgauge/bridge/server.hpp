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

#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "worldgauge/bridge/protocol.hpp"
#include "worldgauge/bridge/transport.hpp"
#include "worldgauge/genmodel/model.hpp"

namespace worldgauge::bridge {

// Serves an in-process model and/or judge over the wire protocol. The
// server itself is immutable; per-connection handshake state lives in
// Connection, so one server can back many concurrent connections.
class BridgeServer {
 public:
  struct Connection {
    bool greeted = false;
    bool closed = false;
  };

  // At least one of model and judge must be set, over the same alphabet.
  BridgeServer(genmodel::ModelHandle model, genmodel::JudgeHandle judge);

  const automata::Alphabet& alphabet() const noexcept { return *alphabet_; }
  std::vector<std::string> capabilities() const;

  // Answers one request line. Never throws for bad input: malformed or
  // failing requests produce an error response.
  std::string handle_line(std::string_view line, Connection& connection) const;

  // Request loop until bye or end of input. Blank lines are ignored.
  void serve(std::istream& in, std::ostream& out) const;

  // Accepts connections on 127.0.0.1:port (0 picks a free port) and serves
  // each on its own thread. `on_listen` receives the bound port. Returns
  // after `max_connections` connections have finished (0 = never) or once
  // `stop` becomes true.
  void serve_tcp(std::uint16_t port, std::size_t max_connections,
                 const std::function<void(std::uint16_t)>& on_listen,
                 const std::atomic<bool>* stop = nullptr) const;

 private:
  Response answer(const Request& request, Connection& connection) const;
  BatchResult answer_item(const BatchItem& item) const;

  genmodel::ModelHandle model_;
  genmodel::JudgeHandle judge_;
  const automata::Alphabet* alphabet_;
};

// A fresh loopback transport bound to its own connection on `server`.
std::unique_ptr<LoopbackTransport> make_loopback(std::shared_ptr<const BridgeServer> server);
TransportFactory loopback_factory(std::shared_ptr<const BridgeServer> server);

}  // namespace worldgauge::bridge
