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
#include <string>
#include <utility>
#include <vector>

#include "worldgauge/genmodel/model.hpp"
#include "worldgauge/metrics/report.hpp"
#include "worldgauge/worlds/nav_world.hpp"

namespace worldgauge::detour {

using worlds::NodeId;

enum class DetourMode { kRandom, kAdversarial };
std::string to_string(DetourMode mode);
DetourMode parse_detour_mode(const std::string& text);

struct DetourConfig {
  double probability = 0.0;
  DetourMode mode = DetourMode::kRandom;
  std::size_t max_len = 100;  // direction tokens (nav) or plies (games)
  std::size_t trials = 100;
  std::size_t workers = 1;
};

struct DetourReport {
  metrics::MetricReport validity;
  std::size_t detours = 0;           // substitutions performed
  std::size_t blocked_detours = 0;   // drawn but no candidate met the constraint
};

// Greedy decoding from (origin, destination) headers drawn uniformly from
// `headers`. Each step is replaced with probability p by another valid
// token (uniform, or the model's lowest-ranked, ties to the largest id)
// among those that keep the destination reachable within max_len. A trial
// is valid when the sequence is accepted, ends with "end" at the
// destination and has at most max_len directions.
DetourReport run_detours(const worlds::NavWorld& world, const genmodel::GenerativeModel& model,
                         const std::vector<std::pair<NodeId, NodeId>>& headers,
                         const DetourConfig& config, std::uint64_t seed);

// Game variant: greedy self-play from the empty prefix with legal-move
// substitutions; valid when the game reaches a position without legal
// moves having only played legal moves.
DetourReport run_detours_game(const worlds::World& world, const genmodel::GenerativeModel& model,
                              const DetourConfig& config, std::uint64_t seed);

enum class Decoding { kGreedy, kSample };

// Decodes one route after the header, stopping at "end", when the model has
// no mass left, or after max_directions + 1 tokens.
TokenSeq decode_route(const genmodel::GenerativeModel& model, const worlds::NavAutomaton& nav,
                      NodeId origin, NodeId dest, Decoding decoding,
                      std::size_t max_directions, Rng& rng);

// Distinct (origin, destination) headers of a corpus, in first-seen order.
std::vector<std::pair<NodeId, NodeId>> corpus_headers(const worlds::NavAutomaton& nav,
                                                     const std::vector<TokenSeq>& corpus);

}  // namespace worldgauge::detour
