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

#include <chrono>
#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

namespace worldgauge::bridge {

// A bidirectional stream of "\n"-framed UTF-8 lines.
//
// Failures raise TransportError: a receive timeout is retriable, end of
// stream and I/O errors are not. Implementations are not thread-safe.
class Transport {
 public:
  virtual ~Transport() = default;
  // `line` must not contain "\n"; the framing newline is appended.
  virtual void send_line(std::string_view line) = 0;
  // Returns one line without its terminator.
  virtual std::string receive_line(std::chrono::milliseconds timeout) = 0;
  virtual void close() = 0;
};

using TransportFactory = std::function<std::unique_ptr<Transport>()>;

// Launches argv[0] (looked up on PATH) with the given arguments and talks to
// it over its stdin/stdout. stderr is inherited. close() shuts stdin and
// waits briefly for the child before killing it.
std::unique_ptr<Transport> spawn_subprocess(const std::vector<std::string>& argv);

std::unique_ptr<Transport> connect_tcp(const std::string& host, std::uint16_t port);

// Splits "host:port". Throws InputError on malformed input.
std::pair<std::string, std::uint16_t> parse_endpoint(std::string_view endpoint);

// Splits a command line on whitespace with single and double quotes
// grouping. No variable expansion.
std::vector<std::string> split_command(std::string_view command);

// In-process peer: every sent line is handed to `handler`, and each line it
// returns is queued for receive_line. Receiving from an empty queue fails
// immediately with a retriable TransportError, as a real peer that never
// answers would after its timeout.
class LoopbackTransport final : public Transport {
 public:
  using Handler = std::function<std::vector<std::string>(std::string_view)>;
  explicit LoopbackTransport(Handler handler) : handler_(std::move(handler)) {}

  void send_line(std::string_view line) override;
  std::string receive_line(std::chrono::milliseconds timeout) override;
  void close() override { closed_ = true; }

  // Every line sent and received, in order, prefixed "> " and "< ".
  const std::vector<std::string>& transcript() const noexcept { return transcript_; }

 private:
  Handler handler_;
  std::deque<std::string> pending_;
  std::vector<std::string> transcript_;
  bool closed_ = false;
};

}  // namespace worldgauge::bridge
