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

#include <memory>
#include <mutex>
#include <optional>
#include <vector>

#include "worldgauge/genmodel/reference_models.hpp"
#include "worldgauge/worlds/street_graph.hpp"
#include "worldgauge/worlds/world.hpp"

namespace worldgauge::worlds {

// Navigation automaton over a street graph. Tokens: node ids 0..V-1 (the
// origin/destination header), then the eight directions, then "end".
// States: 0 reject, 1 start, 2+o header with origin o, then one state per
// (current, destination) pair, then the terminal state after "end".
class NavAutomaton final : public Automaton {
 public:
  explicit NavAutomaton(std::shared_ptr<const StreetGraph> graph);

  const Alphabet& alphabet() const override { return alphabet_; }
  StateId start() const override { return 1; }
  StateId reject() const override { return 0; }
  bool is_state(StateId q) const override { return q <= terminal(); }
  std::string describe_state(StateId q) const override;

  const StreetGraph& graph() const noexcept { return *graph_; }
  const std::shared_ptr<const StreetGraph>& graph_ptr() const noexcept { return graph_; }
  std::size_t num_nodes() const noexcept { return v_; }

  TokenId node_token(NodeId u) const { return static_cast<TokenId>(u); }
  TokenId direction_token(Direction d) const {
    return static_cast<TokenId>(v_ + static_cast<std::size_t>(d));
  }
  TokenId end_token() const { return static_cast<TokenId>(v_ + kNumDirections); }
  bool is_node_token(TokenId a) const { return a < v_; }
  std::optional<Direction> token_direction(TokenId a) const;

  StateId origin_state(NodeId o) const { return 2 + o; }
  StateId nav_state(NodeId current, NodeId dest) const {
    return 2 + v_ + static_cast<StateId>(current) * v_ + dest;
  }
  StateId terminal() const { return 2 + v_ + static_cast<StateId>(v_) * v_; }
  bool is_nav_state(StateId q) const { return q >= 2 + v_ && q < terminal(); }
  // (current, destination) of a navigation state.
  std::pair<NodeId, NodeId> nav_position(StateId q) const;

  // Header + directions + end.
  TokenSeq encode(NodeId origin, NodeId dest, const std::vector<Direction>& dirs,
                  bool with_end = true) const;

  // Hop distance from u to dest; cached per destination.
  std::uint32_t hops(NodeId u, NodeId dest) const;

 protected:
  StateId do_step(StateId q, TokenId a) const override;

 private:
  std::shared_ptr<const StreetGraph> graph_;
  std::size_t v_;
  Alphabet alphabet_;
  mutable std::vector<std::once_flag> hop_once_;
  mutable std::vector<std::vector<std::uint32_t>> hop_cache_;
};

struct NavWorldParams {
  std::size_t max_directions = 99;  // traversals have fewer than 100 directions
};

class NavWorld final : public World {
 public:
  explicit NavWorld(std::shared_ptr<const StreetGraph> graph, NavWorldParams params = {});

  std::string name() const override { return "nav"; }
  std::shared_ptr<const Automaton> automaton() const override { return nav_; }
  const std::shared_ptr<const NavAutomaton>& nav() const noexcept { return nav_; }
  std::optional<TokenId> end_token() const override { return nav_->end_token(); }
  std::size_t suffix_max_len() const override { return params_.max_directions + 1; }

  // Uniform over (current, destination) pairs.
  StateId sample_state(Rng& rng) const override;
  // Header + a reverse random walk of uniform length l, with l capped so the
  // destination stays reachable within the direction budget.
  TokenSeq sample_prefix(StateId q, Rng& rng) const override;
  // Two reverse walks sharing one length l.
  std::optional<std::pair<TokenSeq, TokenSeq>> sample_prefix_pair(StateId q,
                                                                 Rng& rng) const override;

  // Positive weights that favour one step along a shortest path (and "end"
  // at the destination) over other valid tokens. Support is unchanged.
  genmodel::TokenWeighting shortest_path_weighting(double favoured = 4.0) const;

 private:
  std::size_t draw_length(NodeId current, NodeId dest, Rng& rng) const;
  TokenSeq reverse_walk(NodeId current, NodeId dest, std::size_t length, Rng& rng) const;

  std::shared_ptr<const NavAutomaton> nav_;
  NavWorldParams params_;
};

}  // namespace worldgauge::worlds
