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
#include <vector>

#include "worldgauge/genmodel/model.hpp"
#include "worldgauge/metrics/report.hpp"
#include "worldgauge/worlds/world.hpp"

namespace worldgauge::worlds {

struct SeatingStatement {
  enum class Kind { kSeat, kDistance } kind = Kind::kSeat;
  std::size_t a = 0;  // person
  std::size_t b = 0;  // seat (kSeat, 0-based) or second person (kDistance, a < b)
  std::size_t d = 0;  // seat distance (kDistance)
};

// Seating puzzles over n people and n seats. Tokens are statements
// "seat(A,1)" and "dist(A,B,d)" (absolute seat difference, unordered
// pair). The state is the set of arrangements consistent with everything
// said so far; equal sets share one id and the empty set is reject.
class SeatingAutomaton final : public Automaton {
 public:
  using Mask = std::vector<std::uint64_t>;
  // perm[p] is the 0-based seat of person p.
  using Arrangement = std::vector<std::uint8_t>;

  explicit SeatingAutomaton(std::size_t n);

  const Alphabet& alphabet() const override { return alphabet_; }
  StateId start() const override { return 1; }
  StateId reject() const override { return 0; }
  bool is_state(StateId q) const override;
  std::string describe_state(StateId q) const override;

  std::size_t people() const noexcept { return n_; }
  const std::vector<Arrangement>& arrangements() const noexcept { return perms_; }
  const SeatingStatement& statement(TokenId a) const { return statements_.at(a); }
  TokenId seat_token(std::size_t person, std::size_t seat) const;
  bool holds(const SeatingStatement& s, const Arrangement& perm) const;

  Mask mask(StateId q) const;
  StateId intern(const Mask& mask) const;
  std::size_t consistent_count(StateId q) const;
  // Statements true in every arrangement of q.
  std::vector<TokenId> implied_statements(StateId q) const;
  std::size_t interned_states() const;

 protected:
  StateId do_step(StateId q, TokenId a) const override;
  StateId do_run(StateId q, TokenSpan s) const override;

 private:
  std::size_t n_;
  std::vector<Arrangement> perms_;
  std::vector<SeatingStatement> statements_;
  std::vector<Mask> truth_;  // per token
  Alphabet alphabet_;
  mutable std::shared_mutex mutex_;
  mutable std::vector<Mask> states_;  // index = id - 1
  mutable std::map<Mask, StateId> ids_;
};

// Samplers follow the prompting protocol: a state is reached by one or two
// random valid statements, and prefixes to it are built by repeatedly adding
// statements implied by the state until the consistent set equals it.
class SeatingWorld final : public World {
 public:
  explicit SeatingWorld(std::size_t n);

  std::string name() const override { return "seating"; }
  std::shared_ptr<const Automaton> automaton() const override { return seating_; }
  const std::shared_ptr<const SeatingAutomaton>& seating() const noexcept { return seating_; }
  std::size_t suffix_max_len() const override;

  StateId sample_state(Rng& rng) const override;
  TokenSeq sample_prefix(StateId q, Rng& rng) const override;

 private:
  std::shared_ptr<const SeatingAutomaton> seating_;
};

struct SeatingTask {
  TokenSeq statements;
  SeatingAutomaton::Arrangement answer;
};

// Statements pinning down exactly one arrangement. With `minimal`, every
// statement is needed: dropping any one leaves more than one arrangement.
SeatingTask fully_specified_task(const SeatingAutomaton& w, std::uint64_t seed,
                                 bool minimal = true);

// A task instance is solved when, for every person, the judge accepts the
// true "seat(person, s)" and rejects every other seat.
metrics::MetricReport seating_task_accuracy(const SeatingWorld& world,
                                            const genmodel::SequenceJudge& judge,
                                            std::size_t instances, std::uint64_t seed,
                                            bool minimal = true);

}  // namespace worldgauge::worlds
