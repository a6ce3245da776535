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

#include <gtest/gtest.h>

#include <spdlog/sinks/ostream_sink.h>
#include <spdlog/spdlog.h>

#include <cmath>
#include <nlohmann/json.hpp>
#include <sstream>

#include "fixtures.hpp"
#include "worldgauge/bridge/server.hpp"
#include "worldgauge/bridge/session.hpp"
#include "worldgauge/genmodel/reference_models.hpp"
#include "worldgauge/metrics/metrics.hpp"
#include "worldgauge/worlds/connect4.hpp"
#include "worldgauge/worlds/seating.hpp"

namespace worldgauge::bridge {
namespace {

using genmodel::NextDist;

std::shared_ptr<const BridgeServer> connect4_server(std::size_t rows = 2) {
  const auto world = std::make_shared<worlds::Connect4Automaton>(rows);
  return std::make_shared<BridgeServer>(genmodel::make_exact_dfa_model(world),
                                        genmodel::make_exact_dfa_judge(world));
}

// Holds every reply and hands them back in a shuffled order.
class ReorderingTransport final : public Transport {
 public:
  ReorderingTransport(std::shared_ptr<const BridgeServer> server, std::uint64_t seed)
      : server_(std::move(server)), rng_(make_rng(seed)) {}
  void send_line(std::string_view line) override {
    held_.push_back(server_->handle_line(line, connection_));
    max_held = std::max(max_held, held_.size());
  }
  std::string receive_line(std::chrono::milliseconds) override {
    if (held_.empty()) throw TransportError("nothing to receive", true);
    const std::size_t i = uniform_index(rng_, held_.size());
    std::string line = held_[i];
    held_.erase(held_.begin() + static_cast<std::ptrdiff_t>(i));
    return line;
  }
  void close() override {}
  std::size_t max_held = 0;

 private:
  std::shared_ptr<const BridgeServer> server_;
  BridgeServer::Connection connection_;
  std::vector<std::string> held_;
  Rng rng_;
};

// Scripted peer: answers each request with a canned line built from its id.
std::unique_ptr<LoopbackTransport> scripted(std::function<std::string(std::uint64_t)> reply) {
  return std::make_unique<LoopbackTransport>([reply](std::string_view line) {
    return std::vector<std::string>{reply(decode_request(line).id)};
  });
}

automata::Alphabet connect4_alphabet() { return worlds::Connect4Automaton(1).alphabet(); }

TEST(BridgeSession, HandshakeAndExactAnswers) {
  const auto server = connect4_server();
  auto transport = make_loopback(server);
  auto* loop = transport.get();
  BridgeSession session(std::move(transport));
  {
    const auto& ack = session.handshake(server->alphabet());
    EXPECT_EQ(ack.version, kProtocolVersion);
    EXPECT_TRUE(session.has_capability(kCapNextDist));
    EXPECT_TRUE(session.has_capability(kCapAccepts));
    const NextDist d = session.next_dist(TokenSeq{0, 0});
    EXPECT_DOUBLE_EQ(d[0], 0.0);  // column 1 is full with two rows
    for (TokenId a = 1; a < 7; ++a) EXPECT_NEAR(d[a], 1.0 / 6, 1e-15);
    EXPECT_FALSE(session.accepts(TokenSeq{0, 0}, TokenSeq{0}));
    EXPECT_TRUE(session.accepts(TokenSeq{0}, TokenSeq{0}));
  }
  session.close();
  const auto& t = loop->transcript();
  ASSERT_GE(t.size(), 2u);
  EXPECT_EQ(t[t.size() - 2], R"(> {"id":5,"op":"bye"})");
  EXPECT_EQ(t.back(), R"(< {"id":5,"op":"bye_ack"})");
}

TEST(BridgeSession, ResponsesAreMatchedById) {
  const auto server = connect4_server(3);
  std::vector<TokenSeq> prefixes;
  Rng rng = make_rng(5);
  for (int i = 0; i < 300; ++i) {
    TokenSeq p(uniform_index(rng, 10));
    for (auto& t : p) t = static_cast<TokenId>(uniform_index(rng, 7));
    prefixes.push_back(p);
  }
  SessionOptions opts;
  opts.batch_size = 1;  // one request per prefix so replies can interleave
  auto transport = std::make_unique<ReorderingTransport>(server, 9);
  auto* raw = transport.get();
  BridgeSession session(std::move(transport), opts);
  session.handshake(server->alphabet());
  const auto remote = session.next_dist(prefixes);
  const auto world = std::make_shared<worlds::Connect4Automaton>(3);
  const auto local = genmodel::make_exact_dfa_model(world);
  ASSERT_EQ(remote.size(), prefixes.size());
  for (std::size_t i = 0; i < prefixes.size(); ++i) {
    const auto expect = local->next_dist(prefixes[i]);
    ASSERT_EQ(remote[i].is_terminal(), expect.is_terminal()) << i;
    for (TokenId a = 0; a < 7; ++a) ASSERT_NEAR(remote[i][a], expect[a], 1e-15);
  }
  EXPECT_EQ(raw->max_held, opts.max_in_flight);
}

TEST(BridgeSession, UnknownReplyIdBreaksTheSession) {
  int calls = 0;
  const auto server = connect4_server();
  BridgeServer::Connection conn;
  auto t = std::make_unique<LoopbackTransport>([&](std::string_view line) {
    std::string reply = server->handle_line(line, conn);
    if (++calls == 2) reply = R"({"id":999,"accepts":true})";
    return std::vector<std::string>{reply};
  });
  BridgeSession session(std::move(t));
  session.handshake(server->alphabet());
  EXPECT_THROW(session.accepts(TokenSeq{}, TokenSeq{0}), ProtocolError);
  EXPECT_TRUE(session.broken());
  EXPECT_THROW(session.accepts(TokenSeq{}, TokenSeq{0}), TransportError);
}

TEST(BridgeSession, HandshakeMismatches) {
  const auto server = connect4_server();
  {
    BridgeSession s(make_loopback(server));
    const automata::Alphabet other(std::vector<std::string>{"1", "2", "3", "4", "5", "6", "8"});
    EXPECT_THROW(s.handshake(other), ProtocolError);
    EXPECT_TRUE(s.broken());
  }
  {
    BridgeSession s(scripted([](std::uint64_t id) {
      return encode(ResponseEnvelope{id, HelloAck{"wgv0", {"next_distribution"},
                                                  connect4_alphabet().names()}});
    }));
    EXPECT_THROW(s.handshake(connect4_alphabet()), ProtocolError);
  }
  {
    BridgeSession s(scripted([](std::uint64_t id) {
      return encode(ResponseEnvelope{id, HelloAck{"wgv1", {"telepathy"},
                                                  connect4_alphabet().names()}});
    }));
    EXPECT_THROW(s.handshake(connect4_alphabet()), ProtocolError);
  }
  {
    // Same length, one token renamed.
    BridgeSession s(scripted([](std::uint64_t id) {
      auto names = connect4_alphabet().names();
      names[6] = "seven";
      return encode(ResponseEnvelope{id, HelloAck{"wgv1", {"next_distribution"}, names}});
    }));
    EXPECT_THROW(s.handshake(connect4_alphabet()), ProtocolError);
  }
  BridgeServer::Connection conn;
  const auto reply = decode_response(
      server->handle_line(R"({"id":1,"op":"hello","version":"wgv9","alphabet":[]})", conn));
  EXPECT_EQ(std::get<ErrorInfo>(reply.body).code, codes::kVersion);
  const auto early =
      decode_response(server->handle_line(R"({"id":2,"op":"next_dist","prefix":[]})", conn));
  EXPECT_EQ(std::get<ErrorInfo>(early.body).code, codes::kBadRequest);
}

TEST(BridgeSession, JudgeOnlyPeerRefusesDistributions) {
  const auto seating = std::make_shared<worlds::SeatingAutomaton>(3);
  const auto server =
      std::make_shared<BridgeServer>(nullptr, genmodel::make_exact_dfa_judge(seating));
  EXPECT_EQ(server->capabilities(), std::vector<std::string>{"accept_judgment"});
  BridgeSession session(make_loopback(server));
  session.handshake(seating->alphabet());
  EXPECT_FALSE(session.has_capability(kCapNextDist));
  EXPECT_THROW(session.next_dist(TokenSeq{}), ProtocolError);
  EXPECT_TRUE(session.accepts(TokenSeq{}, TokenSeq{seating->seat_token(0, 0)}));
  BridgeServer::Connection conn;
  server->handle_line(R"({"id":1,"op":"hello","version":"wgv1","alphabet":)" +
                          nlohmann::json(seating->alphabet().names()).dump() + "}",
                      conn);
  const auto raw =
      decode_response(server->handle_line(R"({"id":2,"op":"next_dist","prefix":[]})", conn));
  EXPECT_EQ(std::get<ErrorInfo>(raw.body).code, codes::kCapability);
  EXPECT_THROW(BridgeServer(nullptr, nullptr), InputError);
}

TEST(BridgeSession, BatchesHoldAtMost64Items) {
  const auto server = connect4_server();
  auto transport = make_loopback(server);
  auto* loop = transport.get();
  BridgeSession session(std::move(transport));
  session.handshake(server->alphabet());
  std::vector<TokenSeq> prefixes(130);
  for (std::size_t i = 0; i < prefixes.size(); ++i) prefixes[i] = TokenSeq(i % 3, 1);
  const auto batched = session.next_dist(prefixes);
  ASSERT_EQ(batched.size(), 130u);
  std::vector<std::size_t> sizes;
  for (const auto& line : loop->transcript()) {
    if (line.rfind("> ", 0) != 0) continue;
    const auto req = decode_request(line.substr(2));
    if (const auto* b = std::get_if<BatchRequest>(&req.body)) sizes.push_back(b->items.size());
    if (std::holds_alternative<NextDistRequest>(req.body)) sizes.push_back(1);
  }
  EXPECT_EQ(sizes, (std::vector<std::size_t>{64, 64, 2}));
  for (std::size_t i = 0; i < prefixes.size(); ++i) {
    const auto single = session.next_dist(prefixes[i]);
    for (TokenId a = 0; a < 7; ++a) ASSERT_EQ(batched[i][a], single[a]);
  }
  std::vector<std::pair<TokenSeq, TokenSeq>> queries(65, {TokenSeq{}, TokenSeq{0, 0, 0}});
  const auto answers = session.accepts(queries);
  EXPECT_EQ(answers, std::vector<bool>(65, false));
}

TEST(BridgeSession, DistributionDecoding) {
  const double ninf = -std::numeric_limits<double>::infinity();
  std::ostringstream log;
  auto sink = std::make_shared<spdlog::sinks::ostream_sink_mt>(log);
  auto previous = spdlog::default_logger();
  spdlog::set_default_logger(std::make_shared<spdlog::logger>("capture", sink));
  const NextDist half = to_next_dist({std::log(0.25), std::log(0.25), ninf}, 3);
  spdlog::set_default_logger(previous);
  EXPECT_NE(log.str().find("renormalizing"), std::string::npos);
  EXPECT_DOUBLE_EQ(half[0], 0.5);
  EXPECT_DOUBLE_EQ(half[2], 0.0);

  EXPECT_TRUE(to_next_dist({ninf, ninf}, 2).is_terminal());
  EXPECT_THROW(to_next_dist({std::nan(""), 0.0}, 2), ProtocolError);
  EXPECT_THROW(to_next_dist({std::numeric_limits<double>::infinity(), 0.0}, 2), ProtocolError);
  EXPECT_THROW(to_next_dist({0.0}, 2), ProtocolError);
  EXPECT_THROW(to_next_dist({800.0, 0.0}, 2), ProtocolError);
}

TEST(BridgeSession, ErrorRepliesBecomeProtocolErrors) {
  BridgeSession s(scripted([](std::uint64_t id) {
    if (id == 1) {
      return encode(ResponseEnvelope{
          id, HelloAck{"wgv1", {"next_distribution"}, connect4_alphabet().names()}});
    }
    return encode(ResponseEnvelope{id, ErrorInfo{"internal", "boom"}});
  }));
  s.handshake(connect4_alphabet());
  try {
    s.next_dist(TokenSeq{});
    FAIL() << "expected ProtocolError";
  } catch (const ProtocolError& e) {
    EXPECT_NE(std::string(e.what()).find("boom"), std::string::npos);
  }
  BridgeSession silent(std::make_unique<LoopbackTransport>(
      [](std::string_view) { return std::vector<std::string>{}; }));
  try {
    silent.handshake(connect4_alphabet());
    FAIL() << "expected TransportError";
  } catch (const TransportError& e) {
    EXPECT_TRUE(e.retriable());
  }
}

TEST(RemoteModel, MetricsMatchInProcessEvaluation) {
  const worlds::Connect4World world(2);
  const auto model = genmodel::make_random_logit_model(world.automaton()->alphabet(), 3, 2.0);
  const auto server = std::make_shared<BridgeServer>(model, nullptr);
  auto pool = std::make_shared<SessionPool>(loopback_factory(server),
                                            world.automaton()->alphabet());
  const RemoteModel remote(pool);

  metrics::CompressionParams cp;
  cp.num_states = 40;
  cp.samples = 5;
  cp.seed = 8;
  const auto rule = genmodel::AcceptanceRule::epsilon(0.1);
  const auto local = metrics::compression_precision(world, *model, rule, cp);
  const auto via = metrics::compression_precision(world, remote, rule, cp);
  EXPECT_EQ(local.scores, via.scores);
  EXPECT_EQ(local.not_applicable, via.not_applicable);

  metrics::DistinctionParams dp;
  dp.num_pairs = 20;
  dp.samples = 5;
  dp.seed = 8;
  dp.workers = 4;
  const auto a = metrics::distinction_metrics(world, *model, rule, dp);
  const auto b = metrics::distinction_metrics(world, remote, rule, dp);
  EXPECT_EQ(a.recall.scores, b.recall.scores);
  EXPECT_EQ(a.precision.scores, b.precision.scores);
  EXPECT_GE(pool->sessions_opened(), 1u);
  EXPECT_LE(pool->sessions_opened(), 5u);
}

TEST(RemoteModel, TransportFailureAbortsWithPartialResults) {
  const worlds::Connect4World world(2);
  const auto model = genmodel::make_exact_dfa_model(world.automaton());
  const auto server = std::make_shared<BridgeServer>(model, nullptr);
  auto budget = std::make_shared<std::atomic<int>>(std::numeric_limits<int>::max());
  auto used = std::make_shared<std::atomic<int>>(0);
  TransportFactory factory = [server, budget, used] {
    auto conn = std::make_shared<BridgeServer::Connection>();
    return std::make_unique<LoopbackTransport>([server, budget, used, conn](std::string_view line) {
      ++*used;
      if (budget->fetch_sub(1) <= 0) throw TransportError("peer went away", false);
      return std::vector<std::string>{server->handle_line(line, *conn)};
    });
  };
  metrics::CompressionParams cp;
  cp.num_states = 200;
  cp.samples = 2;
  cp.seed = 1;
  const auto rule = genmodel::AcceptanceRule::epsilon(0.01);
  {
    // Measure a full run, then cut the connection halfway through.
    auto counting = std::make_shared<SessionPool>(factory, world.automaton()->alphabet());
    metrics::compression_precision(world, RemoteModel(counting), rule, cp);
  }
  budget->store(used->load() / 2);
  auto pool = std::make_shared<SessionPool>(factory, world.automaton()->alphabet());
  try {
    metrics::compression_precision(world, RemoteModel(pool), rule, cp);
    FAIL() << "expected EvaluationAborted";
  } catch (const metrics::EvaluationAborted& e) {
    const auto& partial = e.partial();
    EXPECT_GT(partial.scores.size(), 0u);
    EXPECT_LT(partial.scores.size(), 200u);
    EXPECT_GT(partial.not_run, 0u);
    for (double s : partial.scores) EXPECT_DOUBLE_EQ(s, 1.0);
  }
}

}  // namespace
}  // namespace worldgauge::bridge
