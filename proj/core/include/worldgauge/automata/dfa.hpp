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

#include <span>
#include <string>
#include <vector>

#include "worldgauge/automata/automaton.hpp"

namespace worldgauge::automata {

// Dense, fully materialized automaton. Transitions are stored row-major:
// transitions[q * |Sigma| + a] = delta(q, a). The reject state must map every
// token to itself. Immutable after construction.
class Dfa final : public Automaton {
 public:
  Dfa(Alphabet alphabet, std::size_t num_states, StateId start,
      StateId reject, std::vector<StateId> transitions);

  const Alphabet& alphabet() const override { return alphabet_; }
  StateId start() const override { return start_; }
  StateId reject() const override { return reject_; }
  bool is_state(StateId q) const override { return q < num_states_; }

  std::size_t num_states() const noexcept { return num_states_; }
  std::span<const StateId> transitions() const noexcept { return table_; }

  StateId target(StateId q, TokenId a) const {
    return table_[q * alphabet_.size() + a];
  }

 protected:
  StateId do_step(StateId q, TokenId a) const override { return target(q, a); }

 private:
  Alphabet alphabet_;
  std::size_t num_states_;
  StateId start_;
  StateId reject_;
  std::vector<StateId> table_;
};

struct Materialized {
  Dfa dfa;
  // original[i] is the id in the source automaton of dense state i.
  std::vector<StateId> original;
};

// BFS copy of the reachable part of any automaton into a dense Dfa. Dense
// ids follow BFS order from the start state; the reject state comes last.
// Throws DomainError when more than max_states states are reachable.
Materialized materialize(const Automaton& w, std::size_t max_states = 1u << 20);

// DFA interchange format (see docs/formats.md):
//   {"alphabet": [...], "format": "wg-dfa-v1", "num_states": n,
//    "reject": r, "start": s, "transitions": [row-major ids]}
// Keys are emitted in sorted order with two-space indentation and a trailing
// newline, so save(load(text)) == text for any document save produced.
std::string dfa_to_json(const Dfa& dfa);
Dfa dfa_from_json(const std::string& text);

void save_dfa(const Dfa& dfa, const std::string& path);
Dfa load_dfa(const std::string& path);

}  // namespace worldgauge::automata
