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

// Independent reference implementations used as test oracles. They favour
// obviousness over speed and share no code with the library beyond its
// public types.
#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <vector>

#include "worldgauge/automata/automaton.hpp"
#include "worldgauge/automata/dfa.hpp"
#include "worldgauge/core/rng.hpp"
#include "worldgauge/worlds/street_graph.hpp"

namespace worldgauge::oracle {

// Random DFA over `alphabet_size` tokens named "a", "b", ... with state
// `num_states - 1` as reject. Each live transition goes to reject with
// probability `reject_prob`, otherwise to a uniformly random live state.
automata::Dfa random_dfa(Rng& rng, std::size_t num_states, std::size_t alphabet_size,
                         double reject_prob = 0.3);

// All sequences over the alphabet of length 1..max_len, in length-then-
// lexicographic order.
std::vector<TokenSeq> all_sequences(std::size_t alphabet_size, std::size_t max_len);

// Plain fold of step() without any library helper.
bool accepted_from(const automata::Automaton& w, StateId q, const TokenSeq& s);

// Boundary between q1 and q2 by the definition: x accepted from q1, not
// from q2, and every proper non-empty prefix of x accepted from both.
std::set<TokenSeq> brute_boundary(const automata::Automaton& w, StateId q1, StateId q2,
                                  std::size_t max_depth);

// Language equality from the start states by BFS over the product, where a
// product state is "bad" if exactly one side is the reject state.
bool same_language(const automata::Dfa& a, const automata::Dfa& b);

// Shortest weighted distances from `origin` via Bellman-Ford.
std::vector<double> bellman_ford(const worlds::StreetGraph& g, worlds::NodeId origin);

// Othello legal-move test by scanning all eight rays from the square on an
// explicit 8x8 array. mover/opponent are bitboards with a1 = bit 0.
bool othello_legal_scan(std::uint64_t mover, std::uint64_t opponent, int square);
std::uint64_t othello_flips_scan(std::uint64_t mover, std::uint64_t opponent, int square);

// Seating: every permutation of n people (perm[p] = seat) consistent with
// the statements, given as (kind, a, b, d) with kind 0 = seat, 1 = dist.
struct Statement {
  int kind;
  int a;
  int b;
  int d;
};
std::vector<std::vector<int>> consistent_arrangements(int n, const std::vector<Statement>& st);

}  // namespace worldgauge::oracle
