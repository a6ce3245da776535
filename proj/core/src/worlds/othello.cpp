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

#include "worldgauge/worlds/othello.hpp"

#include <algorithm>
#include <bit>
#include <mutex>

#include "worldgauge/automata/automaton.hpp"
#include "worldgauge/core/errors.hpp"

namespace worldgauge::worlds {

namespace {

constexpr std::uint64_t kFileA = 0x0101010101010101ULL;
constexpr std::uint64_t kFileH = 0x8080808080808080ULL;

struct Offset {
  int dr;
  int dc;
};
constexpr Offset kOffsets[8] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1},
                                {1, 1}, {1, -1}, {-1, 1}, {-1, -1}};

inline std::uint64_t shift(std::uint64_t x, Offset o) {
  const int s = o.dr * 8 + o.dc;
  std::uint64_t y = s > 0 ? x << s : x >> -s;
  if (o.dc == 1) y &= ~kFileA;
  if (o.dc == -1) y &= ~kFileH;
  return y;
}

constexpr bool is_center(int sq) { return sq == 27 || sq == 28 || sq == 35 || sq == 36; }

std::string square_name(int sq) {
  return std::string{static_cast<char>('a' + sq % 8), static_cast<char>('1' + sq / 8)};
}

}  // namespace

OthelloBoard OthelloBoard::initial() {
  OthelloBoard b;
  // White on d4 and e5, black on e4 and d5; black moves first.
  b.white = (1ULL << 27) | (1ULL << 36);
  b.black = (1ULL << 28) | (1ULL << 35);
  b.to_move = 0;
  return b;
}

std::uint64_t othello_moves(std::uint64_t mover, std::uint64_t opponent) {
  const std::uint64_t empty = ~(mover | opponent);
  std::uint64_t moves = 0;
  for (const Offset o : kOffsets) {
    std::uint64_t x = shift(mover, o) & opponent;
    for (int i = 0; i < 5; ++i) x |= shift(x, o) & opponent;
    moves |= shift(x, o) & empty;
  }
  return moves;
}

std::uint64_t othello_flips(std::uint64_t mover, std::uint64_t opponent, int square) {
  const std::uint64_t m = 1ULL << square;
  if ((mover | opponent) & m) return 0;
  std::uint64_t flips = 0;
  for (const Offset o : kOffsets) {
    std::uint64_t line = 0;
    std::uint64_t x = shift(m, o);
    while (x & opponent) {
      line |= x;
      x = shift(x, o);
    }
    if (x & mover) flips |= line;
  }
  return flips;
}

std::optional<OthelloBoard> othello_play(const OthelloBoard& board, int square) {
  if (square < 0 || square >= 64) return std::nullopt;
  const std::uint64_t p = board.mover();
  const std::uint64_t o = board.opponent();
  const std::uint64_t flips = othello_flips(p, o, square);
  if (flips == 0) return std::nullopt;
  const std::uint64_t np = p | flips | (1ULL << square);
  const std::uint64_t no = o & ~flips;
  OthelloBoard next;
  next.black = board.to_move == 0 ? np : no;
  next.white = board.to_move == 0 ? no : np;
  next.to_move = static_cast<std::uint8_t>(1 - board.to_move);
  if (othello_moves(next.mover(), next.opponent()) == 0 &&
      othello_moves(next.opponent(), next.mover()) != 0) {
    next.to_move = board.to_move;
  }
  return next;
}

std::size_t OthelloAutomaton::KeyHash::operator()(const OthelloBoard& b) const noexcept {
  return static_cast<std::size_t>(mix64(b.black ^ mix64(b.white ^ mix64(b.to_move))));
}

OthelloAutomaton::OthelloAutomaton() : alphabet_([] {
  std::vector<std::string> names;
  for (int sq = 0; sq < 64; ++sq) {
    if (!is_center(sq)) names.push_back(square_name(sq));
  }
  return Alphabet(std::move(names));
}()) {
  token_by_square_.fill(-1);
  for (int sq = 0; sq < 64; ++sq) {
    if (is_center(sq)) continue;
    token_by_square_[sq] = static_cast<int>(squares_.size());
    squares_.push_back(sq);
  }
  intern(OthelloBoard::initial());
}

std::optional<TokenId> OthelloAutomaton::token_of(int square) const {
  if (square < 0 || square >= 64 || token_by_square_[square] < 0) return std::nullopt;
  return static_cast<TokenId>(token_by_square_[square]);
}

bool OthelloAutomaton::is_state(StateId q) const {
  std::shared_lock lock(mutex_);
  return q <= states_.size();
}

OthelloBoard OthelloAutomaton::board(StateId q) const {
  if (q == reject()) throw InputError("the reject state has no board");
  std::shared_lock lock(mutex_);
  if (q > states_.size()) throw InputError("unknown Othello state");
  return states_[q - 1];
}

StateId OthelloAutomaton::intern(const OthelloBoard& b) const {
  {
    std::shared_lock lock(mutex_);
    if (auto it = ids_.find(b); it != ids_.end()) return it->second;
  }
  std::unique_lock lock(mutex_);
  if (auto it = ids_.find(b); it != ids_.end()) return it->second;
  states_.push_back(b);
  const StateId id = states_.size();
  ids_.emplace(b, id);
  return id;
}

StateId OthelloAutomaton::do_step(StateId q, TokenId a) const {
  if (q == reject()) return reject();
  const auto next = othello_play(board(q), squares_[a]);
  return next ? intern(*next) : reject();
}

StateId OthelloAutomaton::do_run(StateId q, TokenSpan s) const {
  if (q == reject()) return reject();
  if (s.empty()) return q;
  OthelloBoard b = board(q);
  for (TokenId a : s) {
    const auto next = othello_play(b, squares_[a]);
    if (!next) return reject();
    b = *next;
  }
  return intern(b);
}

std::string OthelloAutomaton::describe_state(StateId q) const {
  if (q == reject()) return "reject";
  const OthelloBoard b = board(q);
  std::string out;
  for (int r = 7; r >= 0; --r) {
    for (int c = 0; c < 8; ++c) {
      const std::uint64_t m = 1ULL << (r * 8 + c);
      out += (b.black & m) ? 'X' : (b.white & m) ? 'O' : '.';
    }
    out += '/';
  }
  out += b.to_move == 0 ? "X" : "O";
  return out;
}

TokenSeq random_othello_game(const OthelloAutomaton& w, Rng& rng) {
  TokenSeq game;
  OthelloBoard b = OthelloBoard::initial();
  for (;;) {
    std::uint64_t moves = othello_moves(b.mover(), b.opponent());
    if (moves == 0) break;
    const auto pick = uniform_index(rng, static_cast<std::uint64_t>(std::popcount(moves)));
    for (std::uint64_t i = 0; i < pick; ++i) moves &= moves - 1;
    const int sq = std::countr_zero(moves);
    game.push_back(*w.token_of(sq));
    b = *othello_play(b, sq);
  }
  return game;
}

OthelloWorld::OthelloWorld(OthelloWorldParams params)
    : othello_(std::make_shared<OthelloAutomaton>()), params_(params) {
  if (params_.pool_games < 2) throw InputError("Othello pool needs at least two games");
  Rng rng = make_rng(params_.pool_seed);
  games_.reserve(params_.pool_games);
  for (std::size_t g = 0; g < params_.pool_games; ++g) {
    games_.push_back(random_othello_game(*othello_, rng));
    max_length_ = std::max(max_length_, games_.back().size());
  }
  for (std::size_t g = 0; g < games_.size(); ++g) {
    StateId q = othello_->start();
    for (std::size_t t = 1; t <= games_[g].size(); ++t) {
      q = othello_->step(q, games_[g][t - 1]);
      auto& refs = prefixes_[q];
      const TokenSpan mine(games_[g].data(), t);
      const bool duplicate = std::any_of(refs.begin(), refs.end(), [&](const PrefixRef& r) {
        return r.length == t && std::equal(mine.begin(), mine.end(), games_[r.game].begin());
      });
      if (!duplicate) refs.push_back({g, t});
    }
  }
  for (const auto& [q, refs] : prefixes_) {
    if (refs.size() >= 2) shared_.push_back(q);
  }
  if (shared_.empty()) throw DomainError("no board in the Othello pool has two distinct openings");
}

BoundaryConfig OthelloWorld::default_boundary() const {
  BoundaryConfig c;
  c.mode = automata::BoundaryMode::kSampled;
  c.samples = params_.boundary_samples;
  c.max_len = 60;
  return c;
}

TokenSeq OthelloWorld::prefix(const PrefixRef& r) const {
  const auto& g = games_[r.game];
  return TokenSeq(g.begin(), g.begin() + static_cast<std::ptrdiff_t>(r.length));
}

StateId OthelloWorld::sample_state(Rng& rng) const {
  return shared_[uniform_index(rng, shared_.size())];
}

TokenSeq OthelloWorld::sample_prefix(StateId q, Rng& rng) const {
  if (q == othello_->start()) return {};
  auto it = prefixes_.find(q);
  if (it == prefixes_.end()) throw DomainError("board is not in the Othello game pool");
  return prefix(it->second[uniform_index(rng, it->second.size())]);
}

std::optional<std::pair<TokenSeq, TokenSeq>> OthelloWorld::sample_prefix_pair(
    StateId q, Rng& rng) const {
  auto it = prefixes_.find(q);
  if (it == prefixes_.end() || it->second.size() < 2) return std::nullopt;
  const auto& refs = it->second;
  const std::size_t i = uniform_index(rng, refs.size());
  std::size_t j = uniform_index(rng, refs.size() - 1);
  if (j >= i) ++j;
  return std::make_pair(prefix(refs[i]), prefix(refs[j]));
}

std::optional<PrefixPair> OthelloWorld::sample_distinct_pair(Rng& rng) const {
  for (int attempt = 0; attempt < kPairAttempts; ++attempt) {
    const std::size_t t = 1 + uniform_index(rng, max_length_);
    std::vector<std::size_t> long_enough;
    for (std::size_t g = 0; g < games_.size(); ++g) {
      if (games_[g].size() >= t) long_enough.push_back(g);
    }
    if (long_enough.size() < 2) continue;
    const std::size_t a = long_enough[uniform_index(rng, long_enough.size())];
    const std::size_t b = long_enough[uniform_index(rng, long_enough.size())];
    PrefixPair out;
    out.s1 = prefix({a, t});
    out.s2 = prefix({b, t});
    out.q1 = othello_->run(othello_->start(), out.s1);
    out.q2 = othello_->run(othello_->start(), out.s2);
    if (out.q1 != out.q2) return out;
  }
  return std::nullopt;
}

}  // namespace worldgauge::worlds
