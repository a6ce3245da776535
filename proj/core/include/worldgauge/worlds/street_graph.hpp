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

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace worldgauge::worlds {

using NodeId = std::uint32_t;

enum class Direction : std::uint8_t { kN, kS, kE, kW, kNE, kNW, kSE, kSW };
inline constexpr std::size_t kNumDirections = 8;
inline constexpr std::array<std::string_view, kNumDirections> kDirectionNames = {
    "N", "S", "E", "W", "NE", "NW", "SE", "SW"};

std::string_view direction_name(Direction d);
std::optional<Direction> parse_direction(std::string_view name);
// Quantizes a bearing (dx east, dy north) into one of eight 45-degree sectors.
Direction bearing_direction(double dx, double dy);

struct Node {
  double x = 0.0;  // miles east
  double y = 0.0;  // miles north
};

struct Edge {
  NodeId from = 0;
  NodeId to = 0;
  double weight = 0.0;  // miles
  Direction dir = Direction::kN;
};

// Directed street graph with at most one outgoing edge per direction at
// every node.
class StreetGraph {
 public:
  StreetGraph() = default;
  // Throws InputError on out-of-range endpoints, self loops, non-positive
  // weights or two outgoing edges sharing a direction.
  StreetGraph(std::vector<Node> nodes, std::vector<Edge> edges);

  std::size_t num_nodes() const noexcept { return nodes_.size(); }
  std::size_t num_edges() const noexcept { return edges_.size(); }
  const std::vector<Node>& nodes() const noexcept { return nodes_; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }

  // Index into edges() of the edge leaving u in direction d, if any.
  std::optional<std::size_t> edge_index(NodeId u, Direction d) const;
  std::optional<NodeId> neighbor(NodeId u, Direction d) const;
  // Direction of an edge u -> v, if one exists.
  std::optional<Direction> direction_between(NodeId u, NodeId v) const;
  bool has_edge(NodeId u, NodeId v, Direction d) const;

  std::span<const std::size_t> out_edges(NodeId u) const;
  std::span<const std::size_t> in_edges(NodeId v) const;
  double distance(NodeId u, NodeId v) const;

  bool strongly_connected() const;
  // Hop counts from every node to dest (UINT32_MAX when unreachable).
  std::vector<std::uint32_t> hops_to(NodeId dest) const;

 private:
  void check_node(NodeId u) const;

  std::vector<Node> nodes_;
  std::vector<Edge> edges_;
  std::vector<std::int64_t> slot_;  // node * 8 + dir -> edge index or -1
  std::vector<std::size_t> out_offsets_, out_list_;
  std::vector<std::size_t> in_offsets_, in_list_;
};

// JSON interchange: {"format":"wg-graph-v1","nodes":[{id,x,y}],
// "edges":[{from,to,weight,dir}]}. Node ids must be 0..n-1.
std::string graph_to_json(const StreetGraph& graph);
StreetGraph graph_from_json(const std::string& text);
void save_graph(const StreetGraph& graph, const std::string& path);
StreetGraph load_graph(const std::string& path);

struct GridCityParams {
  std::size_t rows = 20;
  std::size_t cols = 20;
  double one_way_fraction = 0.3;  // per street line
  double diagonal_fraction = 0.05;  // per lattice cell
  double spacing = 0.1;  // miles between adjacent intersections
  // Diagonals are only placed where they keep every out-degree within this.
  std::size_t max_out_degree = 4;
  int max_attempts = 1000;
};

// Lattice city with randomized one-way streets and occasional diagonal
// avenues. Regenerates until the graph is strongly connected; throws
// DomainError after max_attempts failures.
StreetGraph gen_grid_city(const GridCityParams& params, std::uint64_t seed);

}  // namespace worldgauge::worlds
