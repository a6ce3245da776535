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

#include <cstdint>
#include <functional>
#include <set>

#include "worldgauge/automata/automaton.hpp"
#include "worldgauge/core/rng.hpp"

namespace worldgauge::automata {

enum class BoundaryMode {
  kExactToDepth,     // every boundary suffix of length <= depth
  kSampled,          // minimal distinguishing prefixes of sampled trajectories
};

// A set of minimal distinguishing suffixes. Elements are non-empty and no
// element is a proper prefix of another; insert() enforces both.
class BoundarySet {
 public:
  BoundarySet(BoundaryMode mode, std::size_t parameter)
      : mode_(mode), parameter_(parameter) {}

  BoundaryMode mode() const noexcept { return mode_; }
  // Depth k for kExactToDepth, sample count M for kSampled.
  std::size_t parameter() const noexcept { return parameter_; }

  const std::set<TokenSeq>& suffixes() const noexcept { return suffixes_; }
  std::size_t size() const noexcept { return suffixes_.size(); }
  bool empty() const noexcept { return suffixes_.empty(); }
  bool contains(const TokenSeq& s) const { return suffixes_.count(s) > 0; }

  // Returns false if already present. Throws InternalError if s is empty or
  // would break prefix-freeness.
  bool insert(TokenSeq s);

  auto begin() const { return suffixes_.begin(); }
  auto end() const { return suffixes_.end(); }

 private:
  BoundaryMode mode_;
  std::size_t parameter_;
  std::set<TokenSeq> suffixes_;
};

// Myhill-Nerode boundary MNB(q1, q2) truncated at depth k: the suffixes
// x = a1..aj (j <= k) accepted from q1 but not from q2 whose proper prefixes
// are all accepted from both. Computed by a depth-first walk of the
// synchronized pair automaton, memoizing the boundary tails of each
// (state1, state2, remaining depth) triple. q1 == q2 yields an empty set.
// Throws InputError if k == 0 or either state is the reject state.
BoundarySet compute_boundary_exact(const Automaton& w, StateId q1, StateId q2,
                                   std::size_t max_depth = 5);

// Draws a continuation from `from`. Must return a sequence accepted from it.
using ContinuationSampler = std::function<TokenSeq(StateId from, Rng& rng)>;

// Sampled approximation of MNB(q1, q2): for each of M trajectories drawn from
// q1, the shortest prefix rejected from q2 (if any) joins the set. Trajectory
// i uses an Rng seeded with derive_seed(seed, i). Throws InternalError if
// the sampler returns a sequence that is not accepted from q1.
BoundarySet compute_boundary_sampled(const Automaton& w, StateId q1,
                                     StateId q2,
                                     const ContinuationSampler& sampler,
                                     std::size_t samples, std::uint64_t seed);

// Uniform random walk over valid tokens, stopping at a state with no valid
// token or after max_len tokens.
ContinuationSampler random_walk_sampler(const Automaton& w,
                                        std::size_t max_len);

}  // namespace worldgauge::automata
