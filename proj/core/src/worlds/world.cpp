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

#include "worldgauge/worlds/world.hpp"

#include "worldgauge/core/errors.hpp"

namespace worldgauge::worlds {

std::optional<std::pair<TokenSeq, TokenSeq>> World::sample_prefix_pair(
    StateId q, Rng& rng) const {
  TokenSeq first = sample_prefix(q, rng);
  for (int attempt = 0; attempt < kPairAttempts; ++attempt) {
    TokenSeq second = sample_prefix(q, rng);
    if (second != first) return std::make_pair(std::move(first), std::move(second));
  }
  return std::nullopt;
}

std::optional<PrefixPair> World::sample_distinct_pair(Rng& rng) const {
  for (int attempt = 0; attempt < kPairAttempts; ++attempt) {
    const StateId q1 = sample_state(rng);
    const StateId q2 = sample_state(rng);
    if (q1 == q2) continue;
    PrefixPair out{q1, q2, sample_prefix(q1, rng), sample_prefix(q2, rng)};
    return out;
  }
  return std::nullopt;
}

BoundarySet World::true_boundary(StateId q1, StateId q2, const BoundaryConfig& config,
                                 std::uint64_t seed) const {
  const auto w = automaton();
  if (config.mode == automata::BoundaryMode::kExactToDepth) {
    return automata::compute_boundary_exact(*w, q1, q2, config.depth);
  }
  return automata::compute_boundary_sampled(
      *w, q1, q2, automata::random_walk_sampler(*w, config.max_len), config.samples,
      seed);
}

TokenSeq World::sample_test_prefix(Rng& rng) const {
  return sample_prefix(sample_state(rng), rng);
}

TokenSeq World::sample_judge_continuation(StateId q, Rng& rng) const {
  const auto w = automaton();
  const auto valid = automata::valid_tokens(*w, q);
  if (!valid.empty() && bernoulli(rng, 0.5)) {
    return {valid[uniform_index(rng, valid.size())]};
  }
  return {static_cast<TokenId>(uniform_index(rng, w->alphabet().size()))};
}

}  // namespace worldgauge::worlds
