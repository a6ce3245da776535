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
#include <vector>

#include "worldgauge/automata/alphabet.hpp"
#include "worldgauge/worlds/nav_world.hpp"
#include "worldgauge/worlds/street_graph.hpp"

namespace worldgauge::worlds {

struct Traversal {
  NodeId origin = 0;
  NodeId dest = 0;
  std::vector<Direction> dirs;
  friend bool operator==(const Traversal&, const Traversal&) = default;
  friend auto operator<=>(const Traversal&, const Traversal&) = default;
};

enum class TraversalMode { kShortest, kNoisyShortest, kRandomWalk };
std::string to_string(TraversalMode mode);
TraversalMode parse_traversal_mode(const std::string& text);

struct TraversalParams {
  TraversalMode mode = TraversalMode::kShortest;
  std::size_t count = 1000;
  std::size_t weight_functions = 50;  // noisy mode, one pool per corpus
  std::size_t min_walk = 3;           // random-walk length range, inclusive
  std::size_t max_walk = 100;
  std::size_t max_directions = 99;
  // Give up after this many draws per requested sequence (duplicates and
  // overlong paths are redrawn).
  std::size_t draws_per_sequence = 50;
};

// Shortest path by total weight. Ties between equal-cost routes go to the
// predecessor settled first; nodes are settled in (distance, id) order.
// Returns nullopt when dest is unreachable.
std::optional<std::vector<Direction>> dijkstra_path(const StreetGraph& graph, NodeId origin,
                                                    NodeId dest,
                                                    const std::vector<double>& weights);

// Distinct traversals; corpus order is generation order. May return fewer
// than params.count when the graph cannot supply that many distinct ones.
std::vector<Traversal> gen_traversals(const StreetGraph& graph,
                                      const TraversalParams& params, std::uint64_t seed);

std::vector<TokenSeq> encode_traversals(const NavAutomaton& nav,
                                        const std::vector<Traversal>& traversals);

struct CorpusSplit {
  std::vector<TokenSeq> train;
  std::vector<TokenSeq> test;
};

// Assigns every (origin, destination) pair wholly to one side. Sequences
// shorter than the two-token header go to train.
CorpusSplit split_by_pair(const std::vector<TokenSeq>& corpus, double test_fraction,
                          std::uint64_t seed);

// One sequence per line, tokens separated by single spaces.
void write_corpus(const std::string& path, const Alphabet& alphabet,
                  const std::vector<TokenSeq>& corpus);
std::vector<TokenSeq> read_corpus(const std::string& path, const Alphabet& alphabet);

}  // namespace worldgauge::worlds
