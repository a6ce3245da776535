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

#include <map>
#include <string>
#include <vector>

#include "worldgauge/worlds/nav_world.hpp"
#include "worldgauge/worlds/street_graph.hpp"

namespace worldgauge::reconstruct {

using worlds::Direction;
using worlds::NodeId;
using worlds::StreetGraph;

struct ReconParams {
  std::size_t max_degree = 4;
  double max_edge_distance = 0.5;  // miles
  // Cap on simulated lookahead steps when scoring a new edge; 0 = none.
  std::size_t lookahead_cap = 0;
};

struct ReconEdge {
  NodeId from = 0;
  NodeId to = 0;
  Direction dir = Direction::kN;
  bool is_true = false;  // present in the true graph with the same label
  friend bool operator==(const ReconEdge&, const ReconEdge&) = default;
};

struct SequenceFailure {
  std::size_t index = 0;  // position in the input corpus
  std::string reason;
};

struct ReconResult {
  // Sorted by (from, to).
  std::vector<ReconEdge> edges;
  std::size_t sequences = 0;
  std::vector<SequenceFailure> failures;
  std::size_t failed() const noexcept { return failures.size(); }
};

// Replays each sequence over an initially empty edge map. A step follows an
// existing reconstructed edge with the same label; otherwise, if the node
// still has degree budget, it adds the true edge with that label when there
// is one, or else the edge to a node within max_edge_distance that lets the
// walk continue furthest. A sequence fails when the budget is exhausted, no
// candidate exists, the token stream is malformed, or the walk does not
// finish at the listed destination. Sequences are processed in input order.
ReconResult reconstruct(const std::vector<TokenSeq>& sequences,
                        const worlds::NavAutomaton& nav, const ReconParams& params);

struct EdgeCounts {
  std::size_t true_edges = 0;
  std::size_t false_edges = 0;
};

EdgeCounts classify_edges(const ReconResult& result, const StreetGraph& truth);

enum class MapFormat { kJson, kDot, kGeoJson };
MapFormat parse_map_format(const std::string& text);

std::string render_map(const ReconResult& result, const StreetGraph& graph, MapFormat format);
void export_map(const ReconResult& result, const StreetGraph& graph, MapFormat format,
                const std::string& path);
// Reads the edge list and failure count back from the JSON export.
ReconResult load_map_json(const std::string& text);

}  // namespace worldgauge::reconstruct
