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

#include "worldgauge/bridge/session.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include <spdlog/spdlog.h>

#include "worldgauge/core/errors.hpp"

namespace worldgauge::bridge {

namespace {

constexpr double kNormTolerance = 1e-6;

[[noreturn]] void remote_error(const ErrorInfo& e) {
  throw ProtocolError("bridge peer error [" + e.code + "]: " + e.message);
}

[[noreturn]] void unexpected(std::string_view what) {
  throw ProtocolError("unexpected bridge response: expected " + std::string(what));
}

}  // namespace

genmodel::NextDist to_next_dist(const std::vector<double>& logprobs, std::size_t size) {
  if (logprobs.size() != size) {
    throw ProtocolError("bridge returned " + std::to_string(logprobs.size()) +
                        " log-probabilities for an alphabet of " + std::to_string(size));
  }
  std::vector<double> p(size);
  double total = 0.0;
  for (std::size_t i = 0; i < size; ++i) {
    const double lp = logprobs[i];
    if (std::isnan(lp) || lp == std::numeric_limits<double>::infinity()) {
      throw ProtocolError("bridge returned a non-finite log-probability");
    }
    p[i] = std::exp(lp);
    total += p[i];
  }
  if (!std::isfinite(total)) throw ProtocolError("bridge distribution does not normalize");
  if (total == 0.0) return genmodel::NextDist::terminal(size);
  if (std::abs(total - 1.0) > kNormTolerance) {
    spdlog::warn("bridge distribution sums to {:.9g}; renormalizing", total);
  }
  return genmodel::NextDist::from_probabilities(std::move(p), true);
}

// ---- BridgeSession ----------------------------------------------------------

BridgeSession::BridgeSession(std::unique_ptr<Transport> transport, SessionOptions options)
    : transport_(std::move(transport)), options_(options) {
  if (!transport_) throw InputError("bridge session needs a transport");
  options_.batch_size = std::clamp<std::size_t>(options_.batch_size, 1, kMaxBatch);
  options_.max_in_flight = std::max<std::size_t>(1, options_.max_in_flight);
}

BridgeSession::~BridgeSession() { close(); }

void BridgeSession::fail_transport(const TransportError& e) {
  broken_ = true;
  throw e;
}

std::vector<Response> BridgeSession::call_many(const std::vector<Request>& requests) {
  if (broken_) throw TransportError("bridge session is broken", false);
  if (closed_) throw TransportError("bridge session is closed", false);

  std::vector<Response> out(requests.size());
  std::vector<bool> filled(requests.size(), false);
  std::unordered_map<std::uint64_t, std::size_t> pending;
  std::size_t sent = 0;
  std::size_t received = 0;
  try {
    while (received < requests.size()) {
      while (sent < requests.size() && pending.size() < options_.max_in_flight) {
        const std::uint64_t id = next_id_++;
        transport_->send_line(encode(RequestEnvelope{id, requests[sent]}));
        pending.emplace(id, sent);
        ++sent;
      }
      const std::string line = transport_->receive_line(options_.timeout);
      ResponseEnvelope reply;
      try {
        reply = decode_response(line);
      } catch (const ProtocolError&) {
        broken_ = true;
        throw;
      }
      const auto it = pending.find(reply.id);
      if (it == pending.end()) {
        broken_ = true;
        throw ProtocolError("bridge response carries unknown id " + std::to_string(reply.id));
      }
      out[it->second] = std::move(reply.body);
      filled[it->second] = true;
      pending.erase(it);
      ++received;
    }
  } catch (const TransportError& e) {
    fail_transport(e);
  }
  return out;
}

const HelloAck& BridgeSession::handshake(const automata::Alphabet& world_alphabet) {
  auto replies = call_many({Hello{std::string(kProtocolVersion), world_alphabet.names()}});
  auto& reply = replies.front();
  if (const auto* e = std::get_if<ErrorInfo>(&reply)) {
    broken_ = true;
    remote_error(*e);
  }
  auto* ack = std::get_if<HelloAck>(&reply);
  if (ack == nullptr) {
    broken_ = true;
    unexpected("hello_ack");
  }
  if (ack->version != kProtocolVersion) {
    broken_ = true;
    throw ProtocolError("bridge version mismatch: peer speaks " + ack->version);
  }
  if (ack->alphabet != world_alphabet.names()) {
    broken_ = true;
    throw ProtocolError("bridge alphabet differs from the world alphabet");
  }
  if (ack->capabilities.empty()) {
    broken_ = true;
    throw ProtocolError("bridge peer declares no capabilities");
  }
  for (const auto& cap : ack->capabilities) {
    if (cap != kCapNextDist && cap != kCapAccepts) {
      broken_ = true;
      throw ProtocolError("bridge peer declares unknown capability '" + cap + "'");
    }
  }
  ack_ = std::move(*ack);
  alphabet_size_ = world_alphabet.size();
  return *ack_;
}

const std::vector<std::string>& BridgeSession::capabilities() const {
  static const std::vector<std::string> none;
  return ack_ ? ack_->capabilities : none;
}

bool BridgeSession::has_capability(std::string_view capability) const {
  const auto& caps = capabilities();
  return std::find(caps.begin(), caps.end(), capability) != caps.end();
}

void BridgeSession::require_ready(std::string_view capability) const {
  if (!ack_) throw ProtocolError("bridge session used before handshake");
  if (!has_capability(capability)) {
    throw ProtocolError("bridge peer does not offer " + std::string(capability));
  }
}

std::vector<genmodel::NextDist> BridgeSession::next_dist(std::span<const TokenSeq> prefixes) {
  require_ready(kCapNextDist);
  std::vector<Request> requests;
  for (std::size_t begin = 0; begin < prefixes.size(); begin += options_.batch_size) {
    const std::size_t end = std::min(prefixes.size(), begin + options_.batch_size);
    if (end - begin == 1) {
      requests.emplace_back(NextDistRequest{prefixes[begin]});
    } else {
      BatchRequest batch;
      for (std::size_t i = begin; i < end; ++i) batch.items.emplace_back(NextDistRequest{prefixes[i]});
      requests.emplace_back(std::move(batch));
    }
  }
  const auto replies = call_many(requests);
  std::vector<genmodel::NextDist> out;
  out.reserve(prefixes.size());
  auto take = [&](const auto& body) {
    using T = std::decay_t<decltype(body)>;
    if constexpr (std::is_same_v<T, NextDistResponse>) {
      out.push_back(to_next_dist(body.logprobs, alphabet_size_));
    } else if constexpr (std::is_same_v<T, ErrorInfo>) {
      remote_error(body);
    } else {
      unexpected("logprobs");
    }
  };
  for (std::size_t r = 0; r < replies.size(); ++r) {
    if (const auto* batch = std::get_if<BatchResponse>(&replies[r])) {
      const std::size_t expected =
          std::min(options_.batch_size, prefixes.size() - r * options_.batch_size);
      if (batch->results.size() != expected) {
        throw ProtocolError("bridge batch answered " + std::to_string(batch->results.size()) +
                            " of " + std::to_string(expected) + " requests");
      }
      for (const auto& x : batch->results) std::visit(take, x);
    } else {
      std::visit(take, replies[r]);
    }
  }
  return out;
}

genmodel::NextDist BridgeSession::next_dist(TokenSpan prefix) {
  const TokenSeq p(prefix.begin(), prefix.end());
  return next_dist(std::span<const TokenSeq>(&p, 1)).front();
}

std::vector<bool> BridgeSession::accepts(
    const std::vector<std::pair<TokenSeq, TokenSeq>>& queries) {
  require_ready(kCapAccepts);
  std::vector<Request> requests;
  for (std::size_t begin = 0; begin < queries.size(); begin += options_.batch_size) {
    const std::size_t end = std::min(queries.size(), begin + options_.batch_size);
    if (end - begin == 1) {
      requests.emplace_back(AcceptsRequest{queries[begin].first, queries[begin].second});
    } else {
      BatchRequest batch;
      for (std::size_t i = begin; i < end; ++i) {
        batch.items.emplace_back(AcceptsRequest{queries[i].first, queries[i].second});
      }
      requests.emplace_back(std::move(batch));
    }
  }
  const auto replies = call_many(requests);
  std::vector<bool> out;
  out.reserve(queries.size());
  auto take = [&](const auto& body) {
    using T = std::decay_t<decltype(body)>;
    if constexpr (std::is_same_v<T, AcceptsResponse>) {
      out.push_back(body.accepts);
    } else if constexpr (std::is_same_v<T, ErrorInfo>) {
      remote_error(body);
    } else {
      unexpected("accepts");
    }
  };
  for (std::size_t r = 0; r < replies.size(); ++r) {
    if (const auto* batch = std::get_if<BatchResponse>(&replies[r])) {
      const std::size_t expected =
          std::min(options_.batch_size, queries.size() - r * options_.batch_size);
      if (batch->results.size() != expected) {
        throw ProtocolError("bridge batch answered " + std::to_string(batch->results.size()) +
                            " of " + std::to_string(expected) + " requests");
      }
      for (const auto& x : batch->results) std::visit(take, x);
    } else {
      std::visit(take, replies[r]);
    }
  }
  return out;
}

bool BridgeSession::accepts(TokenSpan prefix, TokenSpan suffix) {
  return accepts({{TokenSeq(prefix.begin(), prefix.end()), TokenSeq(suffix.begin(), suffix.end())}})
      .front();
}

void BridgeSession::close() {
  if (closed_ || !transport_) return;
  if (!broken_) {
    try {
      call_many({Bye{}});
    } catch (const Error&) {
    }
  }
  closed_ = true;
  try {
    transport_->close();
  } catch (const Error&) {
  }
}

// ---- SessionPool ------------------------------------------------------------

SessionPool::SessionPool(TransportFactory factory, automata::Alphabet alphabet,
                         SessionOptions options)
    : factory_(std::move(factory)), alphabet_(std::move(alphabet)), options_(options) {
  auto first = open();
  capabilities_ = first->capabilities();
  idle_.push_back(std::move(first));
}

SessionPool::~SessionPool() = default;

std::unique_ptr<BridgeSession> SessionPool::open() {
  auto session = std::make_unique<BridgeSession>(factory_(), options_);
  session->handshake(alphabet_);
  std::lock_guard lock(mutex_);
  ++opened_;
  return session;
}

SessionPool::Lease SessionPool::acquire() {
  {
    std::lock_guard lock(mutex_);
    if (!idle_.empty()) {
      auto s = std::move(idle_.back());
      idle_.pop_back();
      return Lease(this, std::move(s));
    }
  }
  return Lease(this, open());
}

SessionPool::Lease::~Lease() {
  if (!session_ || session_->broken()) return;
  std::lock_guard lock(pool_->mutex_);
  pool_->idle_.push_back(std::move(session_));
}

std::size_t SessionPool::sessions_opened() const {
  std::lock_guard lock(mutex_);
  return opened_;
}

// ---- remote adapters --------------------------------------------------------

RemoteModel::RemoteModel(std::shared_ptr<SessionPool> pool, std::string name)
    : pool_(std::move(pool)), name_(std::move(name)) {
  if (!pool_) throw InputError("remote model needs a session pool");
}

genmodel::NextDist RemoteModel::next_dist(TokenSpan prefix) const {
  automata::check_tokens(alphabet(), prefix);
  auto lease = pool_->acquire();
  return lease->next_dist(prefix);
}

std::vector<genmodel::NextDist> RemoteModel::next_dist_batch(
    std::span<const TokenSeq> prefixes) const {
  for (const auto& p : prefixes) automata::check_tokens(alphabet(), p);
  auto lease = pool_->acquire();
  return lease->next_dist(prefixes);
}

RemoteJudge::RemoteJudge(std::shared_ptr<SessionPool> pool) : pool_(std::move(pool)) {
  if (!pool_) throw InputError("remote judge needs a session pool");
}

bool RemoteJudge::accepts(TokenSpan prefix, TokenSpan suffix) const {
  automata::check_tokens(alphabet(), prefix);
  automata::check_tokens(alphabet(), suffix);
  if (suffix.empty()) throw InputError("suffix must be non-empty");
  auto lease = pool_->acquire();
  return lease->accepts(prefix, suffix);
}

}  // namespace worldgauge::bridge
