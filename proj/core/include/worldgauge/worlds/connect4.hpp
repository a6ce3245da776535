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

#include <array>
#include <memory>
#include <shared_mutex>
#include <unordered_map>
#include <vector>

#include "worldgauge/worlds/world.hpp"

namespace worldgauge::worlds {

inline constexpr std::size_t kConnectColumns = 7;
using ColumnCounts = std::array<std::uint16_t, kConnectColumns>;

// Cumulative Connect-4: tokens "1".."7" drop a disk into a column, which is
// valid while the column holds fewer than n disks. The state is the vector
// of column counts; ids are interned lazily (0 is reject, 1 the empty board).
class Connect4Automaton final : public Automaton {
 public:
  explicit Connect4Automaton(std::size_t rows);

  const Alphabet& alphabet() const override { return alphabet_; }
  StateId start() const override { return 1; }
  StateId reject() const override { return 0; }
  bool is_state(StateId q) const override;
  std::string describe_state(StateId q) const override;

  std::size_t rows() const noexcept { return rows_; }
  ColumnCounts counts(StateId q) const;
  StateId intern(const ColumnCounts& counts) const;
  std::size_t interned_states() const;

 protected:
  StateId do_step(StateId q, TokenId a) const override;
  StateId do_run(StateId q, TokenSpan s) const override;

 private:
  struct KeyHash {
    std::size_t operator()(const ColumnCounts& c) const noexcept;
  };

  std::size_t rows_;
  Alphabet alphabet_;
  mutable std::shared_mutex mutex_;
  mutable std::vector<ColumnCounts> states_;  // index = id - 1
  mutable std::unordered_map<ColumnCounts, StateId, KeyHash> ids_;
};

class Connect4World final : public World {
 public:
  explicit Connect4World(std::size_t rows);

  std::string name() const override { return "connect4"; }
  std::shared_ptr<const Automaton> automaton() const override { return c4_; }
  const std::shared_ptr<const Connect4Automaton>& connect4() const noexcept { return c4_; }
  std::size_t suffix_max_len() const override {
    return kConnectColumns * c4_->rows();
  }

  // Every column count drawn independently and uniformly from 0..n.
  StateId sample_state(Rng& rng) const override;
  // A uniformly shuffled ordering of the drops that produce q.
  TokenSeq sample_prefix(StateId q, Rng& rng) const override;

 private:
  std::shared_ptr<const Connect4Automaton> c4_;
};

}  // namespace worldgauge::worlds
