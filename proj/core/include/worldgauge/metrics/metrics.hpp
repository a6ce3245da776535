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
#include <utility>
#include <vector>

#include "worldgauge/genmodel/model.hpp"
#include "worldgauge/metrics/report.hpp"
#include "worldgauge/worlds/world.hpp"

namespace worldgauge::metrics {

using genmodel::AcceptanceRule;
using genmodel::GenerativeModel;
using genmodel::SequenceJudge;
using worlds::World;

// Boundary recall: the share of true boundary suffixes the judge accepts
// after s1 and rejects after s2. nullopt for an empty true boundary.
std::optional<double> boundary_recall(const automata::BoundarySet& world_boundary,
                                      const SequenceJudge& judge, TokenSpan s1,
                                      TokenSpan s2);
std::optional<double> boundary_recall(const automata::BoundarySet& world_boundary,
                                      const GenerativeModel& model, TokenSpan s1,
                                      TokenSpan s2, const AcceptanceRule& rule);

// Boundary precision: the share of model boundary suffixes accepted from q1
// and rejected from q2. An empty model boundary scores 1 when q1 == q2 and
// is not applicable (nullopt) otherwise.
std::optional<double> boundary_precision(const automata::BoundarySet& model_boundary,
                                         const automata::Automaton& w, StateId q1,
                                         StateId q2);

// Monte Carlo model boundary between s1 and s2: the minimal prefix of each
// sampled continuation of s1 that the model rejects after s2.
automata::BoundarySet model_boundary_sampled(const GenerativeModel& model,
                                             TokenSpan s1, TokenSpan s2,
                                             const AcceptanceRule& rule,
                                             const genmodel::SuffixSampling& sampling);

struct CompressionParams {
  std::size_t num_states = 100;
  std::size_t prefix_pairs_per_state = 1;
  std::size_t samples = 30;  // M
  std::size_t max_len = 0;   // 0 = world default
  std::uint64_t seed = 0;
  std::size_t workers = 1;
};

MetricReport compression_precision(const World& world, const GenerativeModel& model,
                                   const AcceptanceRule& rule,
                                   const CompressionParams& params);

struct DistinctionParams {
  std::size_t num_pairs = 100;
  std::size_t prefix_pairs_per_pair = 1;
  std::size_t samples = 30;  // M for the model boundary
  std::size_t max_len = 0;   // 0 = world default
  std::optional<worlds::BoundaryConfig> boundary;  // world default when unset
  std::size_t max_resamples = 64;
  std::uint64_t seed = 0;
  std::size_t workers = 1;
};

struct DistinctionReports {
  MetricReport precision;
  MetricReport recall;
};

DistinctionReports distinction_metrics(const World& world, const GenerativeModel& model,
                                       const AcceptanceRule& rule,
                                       const DistinctionParams& params);

// Fraction of prefixes whose top-1 prediction is valid. With ties every
// token of the argmax set must be valid.
MetricReport next_token_test(const automata::Automaton& w, const GenerativeModel& model,
                             const std::vector<TokenSeq>& prefixes,
                             std::size_t workers = 1);
MetricReport next_token_test_sampled(const World& world, const GenerativeModel& model,
                                     std::size_t count, std::uint64_t seed,
                                     std::size_t workers = 1);

// Judge-mode variants for models that only answer accept/reject queries.
struct JudgedCompressionParams {
  std::size_t num_states = 100;
  std::size_t prefix_pairs_per_state = 1;
  std::size_t continuations = 5;
  std::uint64_t seed = 0;
  std::size_t workers = 1;
};

MetricReport judged_compression_precision(const World& world, const SequenceJudge& judge,
                                          const JudgedCompressionParams& params);

struct JudgedRecallParams {
  std::size_t num_pairs = 100;
  std::size_t samples = 5;  // boundary suffixes queried per pair
  std::optional<worlds::BoundaryConfig> boundary;  // world default when unset
  std::size_t max_resamples = 64;
  std::uint64_t seed = 0;
  std::size_t workers = 1;
};

MetricReport judged_distinction_recall(const World& world, const SequenceJudge& judge,
                                       const JudgedRecallParams& params);

}  // namespace worldgauge::metrics
