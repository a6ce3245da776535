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

#include "worldgauge/automata/automaton.hpp"

#include <deque>
#include <unordered_set>

#include "worldgauge/core/errors.hpp"

namespace worldgauge::automata {

void Automaton::check_state(StateId q) const {
  if (!is_state(q)) throw InputError("unknown state id " + std::to_string(q));
}

StateId Automaton::step(StateId q, TokenId a) const {
  check_state(q);
  if (!alphabet().contains(a)) {
    throw InputError("token id " + std::to_string(a) + " outside alphabet");
  }
  return do_step(q, a);
}

StateId Automaton::run(StateId q, TokenSpan s) const {
  check_state(q);
  check_tokens(alphabet(), s);
  return do_run(q, s);
}

StateId Automaton::do_run(StateId q, TokenSpan s) const {
  const StateId dead = reject();
  for (TokenId a : s) {
    if (q == dead) return dead;
    q = do_step(q, a);
  }
  return q;
}

std::string Automaton::describe_state(StateId q) const {
  if (q == reject()) return "reject";
  return std::to_string(q);
}

bool accepts_from(const Automaton& w, StateId q, TokenSpan s) {
  if (s.empty()) throw InputError("accepts_from: suffix must be non-empty");
  return w.run(q, s) != w.reject();
}

bool mn_interior_member(const Automaton& w, StateId q1, StateId q2,
                        TokenSpan s) {
  if (q1 == w.reject() || q2 == w.reject()) {
    throw InputError("mn_interior_member: states must be accepting");
  }
  return accepts_from(w, q1, s) && accepts_from(w, q2, s);
}

std::vector<TokenId> valid_tokens(const Automaton& w, StateId q) {
  std::vector<TokenId> out;
  const auto n = static_cast<TokenId>(w.alphabet().size());
  for (TokenId a = 0; a < n; ++a) {
    if (w.step(q, a) != w.reject()) out.push_back(a);
  }
  return out;
}

std::vector<StateId> reachable_states(const Automaton& w,
                                      std::size_t max_states) {
  std::vector<StateId> order;
  std::unordered_set<StateId> seen;
  std::deque<StateId> queue;
  const StateId dead = w.reject();
  const auto n = static_cast<TokenId>(w.alphabet().size());
  if (w.start() != dead) {
    queue.push_back(w.start());
    seen.insert(w.start());
  }
  while (!queue.empty()) {
    const StateId q = queue.front();
    queue.pop_front();
    order.push_back(q);
    if (order.size() > max_states) {
      throw DomainError("reachable_states: more than " + std::to_string(max_states) +
                        " states");
    }
    for (TokenId a = 0; a < n; ++a) {
      const StateId next = w.step(q, a);
      if (next != dead && seen.insert(next).second) queue.push_back(next);
    }
  }
  return order;
}

}  // namespace worldgauge::automata
