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

#include "worldgauge/worlds/street_graph.hpp"

#include <cmath>
#include <deque>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include <nlohmann/json.hpp>

#include "worldgauge/core/errors.hpp"
#include "worldgauge/core/rng.hpp"

namespace worldgauge::worlds {

std::string_view direction_name(Direction d) {
  return kDirectionNames.at(static_cast<std::size_t>(d));
}

std::optional<Direction> parse_direction(std::string_view name) {
  for (std::size_t i = 0; i < kNumDirections; ++i) {
    if (kDirectionNames[i] == name) return static_cast<Direction>(i);
  }
  return std::nullopt;
}

Direction bearing_direction(double dx, double dy) {
  if (dx == 0.0 && dy == 0.0) throw InputError("bearing of a zero-length segment");
  // Counter-clockwise from east, in eighths of a turn.
  const double angle = std::atan2(dy, dx);
  long sector = std::lround(angle / (std::numbers::pi / 4.0));
  sector = ((sector % 8) + 8) % 8;
  static constexpr Direction kBySector[8] = {Direction::kE,  Direction::kNE, Direction::kN,
                                            Direction::kNW, Direction::kW,  Direction::kSW,
                                            Direction::kS,  Direction::kSE};
  return kBySector[sector];
}

StreetGraph::StreetGraph(std::vector<Node> nodes, std::vector<Edge> edges)
    : nodes_(std::move(nodes)), edges_(std::move(edges)) {
  const std::size_t n = nodes_.size();
  slot_.assign(n * kNumDirections, -1);
  std::vector<std::size_t> out_count(n + 1, 0), in_count(n + 1, 0);
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    const Edge& e = edges_[i];
    if (e.from >= n || e.to >= n) throw InputError("edge endpoint outside node range");
    if (e.from == e.to) throw InputError("self-loop edges are not allowed");
    if (!(e.weight > 0.0) || !std::isfinite(e.weight)) {
      throw InputError("edge weights must be positive and finite");
    }
    auto& slot = slot_[e.from * kNumDirections + static_cast<std::size_t>(e.dir)];
    if (slot >= 0) {
      throw InputError("node " + std::to_string(e.from) + " has two outgoing " +
                       std::string(direction_name(e.dir)) + " edges");
    }
    slot = static_cast<std::int64_t>(i);
    ++out_count[e.from + 1];
    ++in_count[e.to + 1];
  }
  for (std::size_t u = 0; u < n; ++u) {
    out_count[u + 1] += out_count[u];
    in_count[u + 1] += in_count[u];
  }
  out_offsets_ = out_count;
  in_offsets_ = in_count;
  out_list_.resize(edges_.size());
  in_list_.resize(edges_.size());
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    out_list_[out_count[edges_[i].from]++] = i;
    in_list_[in_count[edges_[i].to]++] = i;
  }
}

void StreetGraph::check_node(NodeId u) const {
  if (u >= nodes_.size()) throw InputError("node id " + std::to_string(u) + " out of range");
}

std::optional<std::size_t> StreetGraph::edge_index(NodeId u, Direction d) const {
  check_node(u);
  const auto s = slot_[u * kNumDirections + static_cast<std::size_t>(d)];
  if (s < 0) return std::nullopt;
  return static_cast<std::size_t>(s);
}

std::optional<NodeId> StreetGraph::neighbor(NodeId u, Direction d) const {
  if (auto i = edge_index(u, d)) return edges_[*i].to;
  return std::nullopt;
}

std::optional<Direction> StreetGraph::direction_between(NodeId u, NodeId v) const {
  for (std::size_t i : out_edges(u)) {
    if (edges_[i].to == v) return edges_[i].dir;
  }
  return std::nullopt;
}

bool StreetGraph::has_edge(NodeId u, NodeId v, Direction d) const {
  auto to = neighbor(u, d);
  return to && *to == v;
}

std::span<const std::size_t> StreetGraph::out_edges(NodeId u) const {
  check_node(u);
  return {out_list_.data() + out_offsets_[u], out_offsets_[u + 1] - out_offsets_[u]};
}

std::span<const std::size_t> StreetGraph::in_edges(NodeId v) const {
  check_node(v);
  return {in_list_.data() + in_offsets_[v], in_offsets_[v + 1] - in_offsets_[v]};
}

double StreetGraph::distance(NodeId u, NodeId v) const {
  check_node(u);
  check_node(v);
  return std::hypot(nodes_[u].x - nodes_[v].x, nodes_[u].y - nodes_[v].y);
}

std::vector<std::uint32_t> StreetGraph::hops_to(NodeId dest) const {
  check_node(dest);
  std::vector<std::uint32_t> hops(nodes_.size(), std::numeric_limits<std::uint32_t>::max());
  std::deque<NodeId> queue{dest};
  hops[dest] = 0;
  while (!queue.empty()) {
    const NodeId v = queue.front();
    queue.pop_front();
    for (std::size_t i : in_edges(v)) {
      const NodeId u = edges_[i].from;
      if (hops[u] == std::numeric_limits<std::uint32_t>::max()) {
        hops[u] = hops[v] + 1;
        queue.push_back(u);
      }
    }
  }
  return hops;
}

bool StreetGraph::strongly_connected() const {
  if (nodes_.empty()) return true;
  for (const auto& h : hops_to(0)) {
    if (h == std::numeric_limits<std::uint32_t>::max()) return false;
  }
  std::vector<bool> seen(nodes_.size(), false);
  std::deque<NodeId> queue{0};
  seen[0] = true;
  std::size_t count = 1;
  while (!queue.empty()) {
    const NodeId u = queue.front();
    queue.pop_front();
    for (std::size_t i : out_edges(u)) {
      const NodeId v = edges_[i].to;
      if (!seen[v]) {
        seen[v] = true;
        ++count;
        queue.push_back(v);
      }
    }
  }
  return count == nodes_.size();
}

namespace {
constexpr const char* kGraphFormat = "wg-graph-v1";
}

std::string graph_to_json(const StreetGraph& graph) {
  nlohmann::ordered_json doc;
  doc["format"] = kGraphFormat;
  auto nodes = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < graph.num_nodes(); ++i) {
    nodes.push_back({{"id", i}, {"x", graph.nodes()[i].x}, {"y", graph.nodes()[i].y}});
  }
  auto edges = nlohmann::ordered_json::array();
  for (const Edge& e : graph.edges()) {
    edges.push_back({{"from", e.from},
                     {"to", e.to},
                     {"weight", e.weight},
                     {"dir", std::string(direction_name(e.dir))}});
  }
  doc["nodes"] = std::move(nodes);
  doc["edges"] = std::move(edges);
  return doc.dump(1) + "\n";
}

StreetGraph graph_from_json(const std::string& text) {
  try {
    const auto doc = nlohmann::json::parse(text);
    if (doc.contains("format") && doc.at("format") != kGraphFormat) {
      throw InputError("unsupported graph format tag " + doc.at("format").dump());
    }
    const auto& jnodes = doc.at("nodes");
    std::vector<Node> nodes(jnodes.size());
    std::vector<bool> seen(jnodes.size(), false);
    for (const auto& jn : jnodes) {
      const auto id = jn.at("id").get<std::size_t>();
      if (id >= nodes.size() || seen[id]) {
        throw InputError("node ids must be a permutation of 0..n-1");
      }
      seen[id] = true;
      nodes[id] = {jn.at("x").get<double>(), jn.at("y").get<double>()};
    }
    std::vector<Edge> edges;
    for (const auto& je : doc.at("edges")) {
      const auto dir = parse_direction(je.at("dir").get<std::string>());
      if (!dir) throw InputError("unknown direction label " + je.at("dir").dump());
      edges.push_back({je.at("from").get<NodeId>(), je.at("to").get<NodeId>(),
                       je.at("weight").get<double>(), *dir});
    }
    return StreetGraph(std::move(nodes), std::move(edges));
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed graph document: ") + e.what());
  }
}

void save_graph(const StreetGraph& graph, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << graph_to_json(graph);
  if (!out) throw IoError("write to '" + path + "' failed");
}

StreetGraph load_graph(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return graph_from_json(buf.str());
}

namespace {

struct Builder {
  const std::vector<Node>& nodes;
  std::vector<Edge> edges;
  std::vector<std::size_t> out_degree = std::vector<std::size_t>(nodes.size(), 0);

  void add(NodeId a, NodeId b) {
    ++out_degree[a];
    const double dx = nodes[b].x - nodes[a].x;
    const double dy = nodes[b].y - nodes[a].y;
    edges.push_back({a, b, std::hypot(dx, dy), bearing_direction(dx, dy)});
  }
  // Two-way, or one-way in a random orientation.
  void street(NodeId a, NodeId b, int orientation) {
    if (orientation >= 0) add(a, b);
    if (orientation <= 0) add(b, a);
  }
  bool fits(NodeId a, NodeId b, int orientation, std::size_t cap) const {
    if (orientation >= 0 && out_degree[a] + 1 > cap) return false;
    if (orientation <= 0 && out_degree[b] + 1 > cap) return false;
    return true;
  }
};

int draw_orientation(Rng& rng, double one_way_fraction) {
  if (!bernoulli(rng, one_way_fraction)) return 0;
  return bernoulli(rng, 0.5) ? 1 : -1;
}

}  // namespace

StreetGraph gen_grid_city(const GridCityParams& p, std::uint64_t seed) {
  if (p.rows == 0 || p.cols == 0 || p.rows * p.cols < 2) {
    throw InputError("grid city needs at least two intersections");
  }
  if (!(p.one_way_fraction >= 0.0 && p.one_way_fraction <= 1.0) ||
      !(p.diagonal_fraction >= 0.0 && p.diagonal_fraction <= 1.0)) {
    throw InputError("grid city fractions must lie in [0, 1]");
  }
  if (!(p.spacing > 0.0)) throw InputError("grid spacing must be positive");

  std::vector<Node> nodes(p.rows * p.cols);
  auto id = [&](std::size_t r, std::size_t c) { return static_cast<NodeId>(r * p.cols + c); };
  for (std::size_t r = 0; r < p.rows; ++r) {
    for (std::size_t c = 0; c < p.cols; ++c) {
      nodes[id(r, c)] = {static_cast<double>(c) * p.spacing,
                         static_cast<double>(r) * p.spacing};
    }
  }

  Rng rng = make_rng(seed);
  for (int attempt = 0; attempt < p.max_attempts; ++attempt) {
    Builder b{nodes, {}};
    for (std::size_t r = 0; r < p.rows; ++r) {
      const int o = draw_orientation(rng, p.one_way_fraction);
      for (std::size_t c = 0; c + 1 < p.cols; ++c) b.street(id(r, c), id(r, c + 1), o);
    }
    for (std::size_t c = 0; c < p.cols; ++c) {
      const int o = draw_orientation(rng, p.one_way_fraction);
      for (std::size_t r = 0; r + 1 < p.rows; ++r) b.street(id(r, c), id(r + 1, c), o);
    }
    for (std::size_t r = 0; r + 1 < p.rows; ++r) {
      for (std::size_t c = 0; c + 1 < p.cols; ++c) {
        if (!bernoulli(rng, p.diagonal_fraction)) continue;
        const int o = draw_orientation(rng, p.one_way_fraction);
        const bool rising = bernoulli(rng, 0.5);
        const NodeId from = rising ? id(r, c) : id(r, c + 1);
        const NodeId to = rising ? id(r + 1, c + 1) : id(r + 1, c);
        if (b.fits(from, to, o, p.max_out_degree)) b.street(from, to, o);
      }
    }
    StreetGraph g(nodes, std::move(b.edges));
    if (g.strongly_connected()) return g;
  }
  throw DomainError("could not generate a strongly connected grid city after " +
                    std::to_string(p.max_attempts) + " attempts");
}

}  // namespace worldgauge::worlds
