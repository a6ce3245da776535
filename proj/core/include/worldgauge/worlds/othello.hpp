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

#include <map>
#include <memory>
#include <shared_mutex>
#include <unordered_map>
#include <vector>

#include "worldgauge/worlds/world.hpp"

namespace worldgauge::worlds {

// Bit i is square (row i / 8, column i % 8); a1 is bit 0, h8 bit 63.
struct OthelloBoard {
  std::uint64_t black = 0;
  std::uint64_t white = 0;
  std::uint8_t to_move = 0;  // 0 black, 1 white
  friend bool operator==(const OthelloBoard&, const OthelloBoard&) = default;

  static OthelloBoard initial();
  std::uint64_t mover() const { return to_move == 0 ? black : white; }
  std::uint64_t opponent() const { return to_move == 0 ? white : black; }
};

// Legal-move mask for the side to move.
std::uint64_t othello_moves(std::uint64_t mover, std::uint64_t opponent);
// Discs flipped by the mover placing on `square`.
std::uint64_t othello_flips(std::uint64_t mover, std::uint64_t opponent, int square);
// Plays `square` for the side to move. A side without a legal reply is
// skipped. Returns nullopt for an illegal move.
std::optional<OthelloBoard> othello_play(const OthelloBoard& board, int square);

// Othello with one token per ply over the 60 non-central squares ("a1" ..
// "h8"). Passes are implicit and a finished game has no valid tokens.
class OthelloAutomaton final : public Automaton {
 public:
  OthelloAutomaton();

  const Alphabet& alphabet() const override { return alphabet_; }
  StateId start() const override { return 1; }
  StateId reject() const override { return 0; }
  bool is_state(StateId q) const override;
  std::string describe_state(StateId q) const override;

  int square_of(TokenId a) const { return squares_.at(a); }
  std::optional<TokenId> token_of(int square) const;
  OthelloBoard board(StateId q) const;
  StateId intern(const OthelloBoard& board) const;

 protected:
  StateId do_step(StateId q, TokenId a) const override;
  StateId do_run(StateId q, TokenSpan s) const override;

 private:
  struct KeyHash {
    std::size_t operator()(const OthelloBoard& b) const noexcept;
  };

  Alphabet alphabet_;
  std::vector<int> squares_;
  std::array<int, 64> token_by_square_{};
  mutable std::shared_mutex mutex_;
  mutable std::vector<OthelloBoard> states_;
  mutable std::unordered_map<OthelloBoard, StateId, KeyHash> ids_;
};

struct OthelloWorldParams {
  std::size_t pool_games = 1000;
  std::uint64_t pool_seed = 0;
  std::size_t boundary_samples = 30;
};

// State samplers backed by a pool of uniformly random games: compression
// boards are those reached by at least two distinct openings, and distinct
// pairs are taken at a common ply from two pool games.
class OthelloWorld final : public World {
 public:
  explicit OthelloWorld(OthelloWorldParams params = {});

  std::string name() const override { return "othello"; }
  std::shared_ptr<const Automaton> automaton() const override { return othello_; }
  const std::shared_ptr<const OthelloAutomaton>& othello() const noexcept { return othello_; }
  std::size_t suffix_max_len() const override { return 60; }
  BoundaryConfig default_boundary() const override;

  StateId sample_state(Rng& rng) const override;
  TokenSeq sample_prefix(StateId q, Rng& rng) const override;
  std::optional<std::pair<TokenSeq, TokenSeq>> sample_prefix_pair(StateId q,
                                                                 Rng& rng) const override;
  std::optional<PrefixPair> sample_distinct_pair(Rng& rng) const override;

  const std::vector<TokenSeq>& pool() const noexcept { return games_; }
  std::size_t compression_candidates() const noexcept { return shared_.size(); }

 private:
  struct PrefixRef {
    std::size_t game;
    std::size_t length;
  };
  TokenSeq prefix(const PrefixRef& r) const;

  std::shared_ptr<const OthelloAutomaton> othello_;
  OthelloWorldParams params_;
  std::vector<TokenSeq> games_;
  std::map<StateId, std::vector<PrefixRef>> prefixes_;
  std::vector<StateId> shared_;  // states with >= 2 distinct prefixes
  std::size_t max_length_ = 0;
};

// A uniformly random complete game.
TokenSeq random_othello_game(const OthelloAutomaton& w, Rng& rng);

}  // namespace worldgauge::worlds
