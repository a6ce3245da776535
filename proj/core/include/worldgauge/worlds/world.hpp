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
#include <memory>
#include <optional>
#include <string>
#include <utility>

#include "worldgauge/automata/automaton.hpp"
#include "worldgauge/automata/boundary.hpp"
#include "worldgauge/core/rng.hpp"

namespace worldgauge::worlds {

using automata::Alphabet;
using automata::Automaton;
using automata::BoundarySet;

struct PrefixPair {
  StateId q1 = 0;
  StateId q2 = 0;
  TokenSeq s1;
  TokenSeq s2;
};

struct BoundaryConfig {
  automata::BoundaryMode mode = automata::BoundaryMode::kExactToDepth;
  std::size_t depth = 5;      // exact mode
  std::size_t samples = 30;   // sampled mode
  std::size_t max_len = 100;  // sampled trajectory cap
};

// A ground-truth automaton together with the samplers the evaluation
// metrics need. Implementations are immutable; every sampler draws only
// from the generator it is handed.
class World {
 public:
  virtual ~World() = default;

  virtual std::string name() const = 0;
  virtual std::shared_ptr<const Automaton> automaton() const = 0;
  const Alphabet& alphabet() const { return automaton()->alphabet(); }

  virtual std::optional<TokenId> end_token() const { return std::nullopt; }
  // Cap on sampled suffix length.
  virtual std::size_t suffix_max_len() const { return 100; }

  // A state drawn from the world's evaluation distribution. Never reject.
  virtual StateId sample_state(Rng& rng) const = 0;
  // A prefix s with run(start, s) == q. Throws DomainError if q cannot be
  // reached by the sampler.
  virtual TokenSeq sample_prefix(StateId q, Rng& rng) const = 0;

  // Two different prefixes reaching q, or nullopt if the sampler cannot
  // find a second one.
  virtual std::optional<std::pair<TokenSeq, TokenSeq>> sample_prefix_pair(
      StateId q, Rng& rng) const;

  // q1 != q2 with one prefix each.
  virtual std::optional<PrefixPair> sample_distinct_pair(Rng& rng) const;

  // How true boundaries are computed unless a caller overrides it.
  virtual BoundaryConfig default_boundary() const { return {}; }

  virtual BoundarySet true_boundary(StateId q1, StateId q2,
                                    const BoundaryConfig& config,
                                    std::uint64_t seed) const;

  // Prefix for the next-token test.
  virtual TokenSeq sample_test_prefix(Rng& rng) const;

  // Candidate suffix for judge-based compression checks: one valid token
  // half of the time, one uniformly random token otherwise.
  virtual TokenSeq sample_judge_continuation(StateId q, Rng& rng) const;

 protected:
  static constexpr int kPairAttempts = 32;
};

using WorldHandle = std::shared_ptr<const World>;

}  // namespace worldgauge::worlds
