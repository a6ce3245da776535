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

#include <string>
#include <vector>

#include "worldgauge/automata/alphabet.hpp"
#include "worldgauge/core/types.hpp"

namespace worldgauge::automata {

// Read-only view of a deterministic automaton W = (Q, Sigma, delta, q0, F)
// with one absorbing reject state and F = Q \ {reject}.
//
// Implementations may be dense tables (Dfa) or implicit worlds that compute
// states on demand. State ids are opaque; is_state() decides which ids are
// currently meaningful. All member functions are safe to call concurrently.
class Automaton {
 public:
  virtual ~Automaton() = default;

  virtual const Alphabet& alphabet() const = 0;
  virtual StateId start() const = 0;
  virtual StateId reject() const = 0;
  virtual bool is_state(StateId q) const = 0;

  // Checked transition. Throws InputError for an unknown state or token.
  StateId step(StateId q, TokenId a) const;

  // Checked extended transition. run(q, {}) == q.
  StateId run(StateId q, TokenSpan s) const;

  bool is_accepting(StateId q) const { return q != reject(); }

  // Human readable label for diagnostics and exported reports.
  virtual std::string describe_state(StateId q) const;

 protected:
  // Unchecked transition. Must return reject() when q == reject().
  virtual StateId do_step(StateId q, TokenId a) const = 0;

  // Unchecked fold of do_step. Worlds whose intermediate states are
  // expensive to materialize override this.
  virtual StateId do_run(StateId q, TokenSpan s) const;

  void check_state(StateId q) const;
};

// True iff s is non-empty and run(q, s) != reject. Throws InputError when s
// is empty: the per-state language only contains non-empty sequences.
bool accepts_from(const Automaton& w, StateId q, TokenSpan s);

// Membership in the Myhill-Nerode interior of (q1, q2): s accepted from both.
bool mn_interior_member(const Automaton& w, StateId q1, StateId q2,
                        TokenSpan s);

// Tokens a with step(q, a) != reject, in id order.
std::vector<TokenId> valid_tokens(const Automaton& w, StateId q);

// Accepting states reachable from the start state, in BFS order (start
// first). Reject is never included. Throws DomainError if more than
// max_states states are found.
std::vector<StateId> reachable_states(const Automaton& w,
                                      std::size_t max_states = 1u << 22);

}  // namespace worldgauge::automata
