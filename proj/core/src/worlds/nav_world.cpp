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

#include "worldgauge/worlds/nav_world.hpp"

#include <limits>

#include "worldgauge/core/errors.hpp"

namespace worldgauge::worlds {

namespace {

Alphabet nav_alphabet(std::size_t v) {
  std::vector<std::string> names;
  names.reserve(v + kNumDirections + 1);
  for (std::size_t u = 0; u < v; ++u) names.push_back(std::to_string(u));
  for (auto d : kDirectionNames) names.emplace_back(d);
  names.emplace_back("end");
  return Alphabet(std::move(names));
}

constexpr std::uint32_t kUnreachable = std::numeric_limits<std::uint32_t>::max();

}  // namespace

NavAutomaton::NavAutomaton(std::shared_ptr<const StreetGraph> graph)
    : graph_(std::move(graph)),
      v_(graph_ ? graph_->num_nodes() : 0),
      alphabet_(nav_alphabet(v_)),
      hop_once_(v_),
      hop_cache_(v_) {
  if (v_ == 0) throw InputError("navigation world needs a non-empty graph");
}

std::optional<Direction> NavAutomaton::token_direction(TokenId a) const {
  if (a < v_ || a >= v_ + kNumDirections) return std::nullopt;
  return static_cast<Direction>(a - v_);
}

std::pair<NodeId, NodeId> NavAutomaton::nav_position(StateId q) const {
  if (!is_nav_state(q)) throw InputError("not a navigation state");
  const StateId k = q - 2 - v_;
  return {static_cast<NodeId>(k / v_), static_cast<NodeId>(k % v_)};
}

StateId NavAutomaton::do_step(StateId q, TokenId a) const {
  if (q == reject() || q == terminal()) return reject();
  if (q == start()) return is_node_token(a) ? origin_state(a) : reject();
  if (q < 2 + v_) {
    return is_node_token(a) ? nav_state(static_cast<NodeId>(q - 2), a) : reject();
  }
  const auto [current, dest] = nav_position(q);
  if (a == end_token()) return current == dest ? terminal() : reject();
  if (auto d = token_direction(a)) {
    if (auto next = graph_->neighbor(current, *d)) return nav_state(*next, dest);
  }
  return reject();
}

std::string NavAutomaton::describe_state(StateId q) const {
  if (q == reject()) return "reject";
  if (q == start()) return "start";
  if (q == terminal()) return "terminal";
  if (q < 2 + v_) return "origin(" + std::to_string(q - 2) + ")";
  const auto [current, dest] = nav_position(q);
  return "at(" + std::to_string(current) + ")->dest(" + std::to_string(dest) + ")";
}

TokenSeq NavAutomaton::encode(NodeId origin, NodeId dest, const std::vector<Direction>& dirs,
                              bool with_end) const {
  if (origin >= v_ || dest >= v_) throw InputError("encode: node id out of range");
  TokenSeq out;
  out.reserve(dirs.size() + 3);
  out.push_back(node_token(origin));
  out.push_back(node_token(dest));
  for (Direction d : dirs) out.push_back(direction_token(d));
  if (with_end) out.push_back(end_token());
  return out;
}

std::uint32_t NavAutomaton::hops(NodeId u, NodeId dest) const {
  if (u >= v_ || dest >= v_) throw InputError("hops: node id out of range");
  std::call_once(hop_once_[dest], [&] { hop_cache_[dest] = graph_->hops_to(dest); });
  return hop_cache_[dest][u];
}

NavWorld::NavWorld(std::shared_ptr<const StreetGraph> graph, NavWorldParams params)
    : nav_(std::make_shared<NavAutomaton>(std::move(graph))), params_(params) {}

StateId NavWorld::sample_state(Rng& rng) const {
  const std::size_t v = nav_->num_nodes();
  for (;;) {
    const auto current = static_cast<NodeId>(uniform_index(rng, v));
    const auto dest = static_cast<NodeId>(uniform_index(rng, v));
    if (nav_->hops(current, dest) <= params_.max_directions) {
      return nav_->nav_state(current, dest);
    }
  }
}

std::size_t NavWorld::draw_length(NodeId current, NodeId dest, Rng& rng) const {
  const std::uint32_t remaining = nav_->hops(current, dest);
  if (remaining == kUnreachable || remaining > params_.max_directions) {
    throw DomainError("destination is not reachable within the direction budget");
  }
  return static_cast<std::size_t>(
      uniform_index(rng, params_.max_directions - remaining + 1));
}

TokenSeq NavWorld::reverse_walk(NodeId current, NodeId dest, std::size_t length,
                                Rng& rng) const {
  const StreetGraph& g = nav_->graph();
  std::vector<Direction> dirs(length);
  NodeId node = current;
  for (std::size_t i = length; i-- > 0;) {
    const auto incoming = g.in_edges(node);
    if (incoming.empty()) throw DomainError("reverse walk reached a node with no in-edges");
    const Edge& e = g.edges()[incoming[uniform_index(rng, incoming.size())]];
    dirs[i] = e.dir;
    node = e.from;
  }
  return nav_->encode(node, dest, dirs, /*with_end=*/false);
}

TokenSeq NavWorld::sample_prefix(StateId q, Rng& rng) const {
  if (q == nav_->start()) return {};
  if (q >= 2 && q < 2 + nav_->num_nodes()) return {static_cast<TokenId>(q - 2)};
  if (!nav_->is_nav_state(q)) throw DomainError("prefix sampler: state has no prefix sampler");
  const auto [current, dest] = nav_->nav_position(q);
  return reverse_walk(current, dest, draw_length(current, dest, rng), rng);
}

std::optional<std::pair<TokenSeq, TokenSeq>> NavWorld::sample_prefix_pair(StateId q,
                                                                        Rng& rng) const {
  if (!nav_->is_nav_state(q)) return World::sample_prefix_pair(q, rng);
  const auto [current, dest] = nav_->nav_position(q);
  for (int attempt = 0; attempt < kPairAttempts; ++attempt) {
    const std::size_t l = draw_length(current, dest, rng);
    TokenSeq a = reverse_walk(current, dest, l, rng);
    TokenSeq b = reverse_walk(current, dest, l, rng);
    if (a != b) return std::make_pair(std::move(a), std::move(b));
  }
  return std::nullopt;
}

genmodel::TokenWeighting NavWorld::shortest_path_weighting(double favoured) const {
  auto nav = nav_;
  return [nav, favoured](StateId q, TokenId a) -> double {
    if (!nav->is_nav_state(q)) return 1.0;
    const auto [current, dest] = nav->nav_position(q);
    if (a == nav->end_token()) return favoured;
    const auto d = nav->token_direction(a);
    if (!d) return 1.0;
    const auto next = nav->graph().neighbor(current, *d);
    if (!next) return 1.0;
    return nav->hops(*next, dest) + 1 == nav->hops(current, dest) ? favoured : 1.0;
  };
}

}  // namespace worldgauge::worlds
