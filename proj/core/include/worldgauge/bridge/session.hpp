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
#include <memory>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

#include "worldgauge/bridge/protocol.hpp"
#include "worldgauge/bridge/transport.hpp"
#include "worldgauge/genmodel/model.hpp"

namespace worldgauge::bridge {

struct SessionOptions {
  std::chrono::milliseconds timeout{30000};
  // Maximum number of requests on the wire awaiting a response.
  std::size_t max_in_flight = 8;
  // Items per batch message, at most kMaxBatch.
  std::size_t batch_size = kMaxBatch;
};

// Client side of one bridge connection. Not safe for concurrent use; the
// evaluation engine opens one session per worker.
//
// Any transport or protocol failure leaves the session broken, after which
// every call throws TransportError.
class BridgeSession {
 public:
  BridgeSession(std::unique_ptr<Transport> transport, SessionOptions options = {});
  ~BridgeSession();
  BridgeSession(const BridgeSession&) = delete;
  BridgeSession& operator=(const BridgeSession&) = delete;

  // Sends hello with the world alphabet and checks the acknowledgement:
  // same version, token-for-token identical alphabet, known capabilities.
  // Throws ProtocolError on mismatch.
  const HelloAck& handshake(const automata::Alphabet& world_alphabet);

  bool has_capability(std::string_view capability) const;
  const std::vector<std::string>& capabilities() const;
  bool broken() const noexcept { return broken_; }

  // Throws ProtocolError when the peer lacks next_distribution or answers
  // with an error or a malformed distribution.
  std::vector<genmodel::NextDist> next_dist(std::span<const TokenSeq> prefixes);
  genmodel::NextDist next_dist(TokenSpan prefix);

  std::vector<bool> accepts(const std::vector<std::pair<TokenSeq, TokenSeq>>& queries);
  bool accepts(TokenSpan prefix, TokenSpan suffix);

  // Sends bye and waits for the acknowledgement. Errors are swallowed.
  void close();

  // Pipelined exchange; responses are matched to requests by id and
  // returned in request order regardless of arrival order.
  std::vector<Response> call_many(const std::vector<Request>& requests);

 private:
  void require_ready(std::string_view capability) const;
  [[noreturn]] void fail_transport(const TransportError& e);

  std::unique_ptr<Transport> transport_;
  SessionOptions options_;
  std::uint64_t next_id_ = 1;
  bool broken_ = false;
  bool closed_ = false;
  std::optional<HelloAck> ack_;
  std::size_t alphabet_size_ = 0;
};

// Converts wire log-probabilities to a distribution over `size` tokens.
// Renormalizes with a warning when the total drifts from 1 by more than
// 1e-6; all-null vectors give the terminal distribution.
genmodel::NextDist to_next_dist(const std::vector<double>& logprobs, std::size_t size);

// Thread-safe set of handshaken sessions. Workers lease a session for the
// duration of a call; broken sessions are dropped rather than returned.
class SessionPool {
 public:
  SessionPool(TransportFactory factory, automata::Alphabet alphabet, SessionOptions options = {});
  ~SessionPool();

  class Lease {
   public:
    Lease(SessionPool* pool, std::unique_ptr<BridgeSession> session)
        : pool_(pool), session_(std::move(session)) {}
    Lease(Lease&&) noexcept = default;
    ~Lease();
    BridgeSession* operator->() const { return session_.get(); }
    BridgeSession& operator*() const { return *session_; }

   private:
    SessionPool* pool_;
    std::unique_ptr<BridgeSession> session_;
  };

  Lease acquire();
  const automata::Alphabet& alphabet() const noexcept { return alphabet_; }
  const std::vector<std::string>& capabilities() const noexcept { return capabilities_; }
  std::size_t sessions_opened() const;

 private:
  std::unique_ptr<BridgeSession> open();

  TransportFactory factory_;
  automata::Alphabet alphabet_;
  SessionOptions options_;
  std::vector<std::string> capabilities_;
  mutable std::mutex mutex_;
  std::vector<std::unique_ptr<BridgeSession>> idle_;
  std::size_t opened_ = 0;
};

// GenerativeModel whose distributions come from a bridge peer.
class RemoteModel final : public genmodel::GenerativeModel {
 public:
  RemoteModel(std::shared_ptr<SessionPool> pool, std::string name = "remote");
  const automata::Alphabet& alphabet() const override { return pool_->alphabet(); }
  std::string name() const override { return name_; }
  genmodel::NextDist next_dist(TokenSpan prefix) const override;
  std::vector<genmodel::NextDist> next_dist_batch(
      std::span<const TokenSeq> prefixes) const override;

 private:
  std::shared_ptr<SessionPool> pool_;
  std::string name_;
};

// SequenceJudge answered by a bridge peer with the accept_judgment
// capability.
class RemoteJudge final : public genmodel::SequenceJudge {
 public:
  explicit RemoteJudge(std::shared_ptr<SessionPool> pool);
  const automata::Alphabet& alphabet() const override { return pool_->alphabet(); }
  bool accepts(TokenSpan prefix, TokenSpan suffix) const override;

 private:
  std::shared_ptr<SessionPool> pool_;
};

}  // namespace worldgauge::bridge
