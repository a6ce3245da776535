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

#include "worldgauge/reconstruct/reconstruct.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

#include "worldgauge/core/errors.hpp"

namespace worldgauge::reconstruct {

namespace {

constexpr std::int64_t kNoEdge = -1;

// The reconstructed map D-hat: one label per ordered node pair and at most
// one target per (node, label).
class EdgeMap {
 public:
  explicit EdgeMap(std::size_t n) : slot_(n), labels_(n) {
    for (auto& s : slot_) s.fill(kNoEdge);
  }

  std::optional<NodeId> follow(NodeId u, Direction d) const {
    const auto t = slot_[u][static_cast<std::size_t>(d)];
    if (t == kNoEdge) return std::nullopt;
    return static_cast<NodeId>(t);
  }
  std::optional<Direction> label(NodeId u, NodeId v) const {
    auto it = labels_[u].find(v);
    if (it == labels_[u].end()) return std::nullopt;
    return it->second;
  }
  std::size_t degree(NodeId u) const { return labels_[u].size(); }
  void add(NodeId u, NodeId v, Direction d) {
    slot_[u][static_cast<std::size_t>(d)] = v;
    labels_[u].emplace(v, d);
  }
  const std::vector<std::map<NodeId, Direction>>& labels() const { return labels_; }

 private:
  std::vector<std::array<std::int64_t, worlds::kNumDirections>> slot_;
  std::vector<std::map<NodeId, Direction>> labels_;
};

// Edges a lookahead would add, layered over the committed map.
struct Overlay {
  const EdgeMap& base;
  std::vector<std::tuple<NodeId, NodeId, Direction>> extra;

  std::optional<NodeId> follow(NodeId u, Direction d) const {
    if (auto v = base.follow(u, d)) return v;
    for (const auto& [a, b, dir] : extra) {
      if (a == u && dir == d) return b;
    }
    return std::nullopt;
  }
  bool has_pair(NodeId u, NodeId v) const {
    if (base.label(u, v)) return true;
    for (const auto& [a, b, dir] : extra) {
      if (a == u && b == v) return true;
    }
    return false;
  }
  std::size_t degree(NodeId u) const {
    std::size_t d = base.degree(u);
    for (const auto& e : extra) d += std::get<0>(e) == u;
    return d;
  }
};

class Reconstructor {
 public:
  Reconstructor(const worlds::NavAutomaton& nav, const ReconParams& params)
      : nav_(nav), graph_(nav.graph()), params_(params), map_(graph_.num_nodes()) {
    if (params.max_degree < 1 || params.max_degree > worlds::kNumDirections) {
      throw InputError("max degree must lie in 1..8");
    }
    if (!(params.max_edge_distance > 0.0)) throw InputError("max edge distance must be positive");
  }

  // Empty string on success, otherwise the failure reason.
  std::string run(const TokenSeq& s) {
    if (s.size() < 3) return "sequence shorter than header plus end token";
    if (!nav_.is_node_token(s[0]) || !nav_.is_node_token(s[1])) {
      return "header must be two node tokens";
    }
    NodeId u = s[0];
    const NodeId dest = s[1];
    for (std::size_t j = 2;; ++j) {
      if (j >= s.size()) return "missing end token";
      if (s[j] == nav_.end_token()) break;
      const auto d = nav_.token_direction(s[j]);
      if (!d) return "unexpected token at position " + std::to_string(j);
      if (auto v = map_.follow(u, *d)) {
        u = *v;
        continue;
      }
      if (map_.degree(u) >= params_.max_degree) {
        return "degree budget exhausted at node " + std::to_string(u);
      }
      if (auto v = graph_.neighbor(u, *d)) {
        if (map_.label(u, *v)) {
          return "true edge " + std::to_string(u) + "->" + std::to_string(*v) +
                 " already carries another label";
        }
        map_.add(u, *v, *d);
        u = *v;
        continue;
      }
      const auto v = best_new_edge(s, j, u, *d);
      if (!v) return "no candidate node within distance of node " + std::to_string(u);
      map_.add(u, *v, *d);
      u = *v;
    }
    if (u != dest) return "walk ends at node " + std::to_string(u) + ", not the destination";
    return {};
  }

  std::vector<ReconEdge> edges() const {
    std::vector<ReconEdge> out;
    for (NodeId u = 0; u < map_.labels().size(); ++u) {
      for (const auto& [v, d] : map_.labels()[u]) {
        out.push_back({u, v, d, graph_.has_edge(u, v, d)});
      }
    }
    return out;
  }

 private:
  // Steps the walk would take through s[j+1..] after adding u -(d)-> v,
  // stopping where the replay would fail or need another invented edge.
  std::size_t lookahead(const TokenSeq& s, std::size_t j, NodeId u, NodeId v,
                        Direction d) const {
    Overlay overlay{map_, {{u, v, d}}};
    NodeId cur = v;
    std::size_t steps = 0;
    for (std::size_t k = j + 1; k < s.size(); ++k) {
      if (params_.lookahead_cap && steps >= params_.lookahead_cap) break;
      const auto dir = nav_.token_direction(s[k]);
      if (!dir) break;
      if (auto next = overlay.follow(cur, *dir)) {
        cur = *next;
        ++steps;
        continue;
      }
      if (overlay.degree(cur) >= params_.max_degree) break;
      const auto next = graph_.neighbor(cur, *dir);
      if (!next || overlay.has_pair(cur, *next)) break;
      overlay.extra.emplace_back(cur, *next, *dir);
      cur = *next;
      ++steps;
    }
    return steps;
  }

  std::optional<NodeId> best_new_edge(const TokenSeq& s, std::size_t j, NodeId u,
                                      Direction d) const {
    std::optional<NodeId> best;
    std::size_t best_steps = 0;
    double best_dist = 0.0;
    for (NodeId v = 0; v < graph_.num_nodes(); ++v) {
      if (v == u || map_.label(u, v)) continue;
      const double dist = graph_.distance(u, v);
      if (dist > params_.max_edge_distance) continue;
      const std::size_t steps = lookahead(s, j, u, v, d);
      // Ties: shorter edge, then lower node id (v increases monotonically).
      if (!best || steps > best_steps || (steps == best_steps && dist < best_dist)) {
        best = v;
        best_steps = steps;
        best_dist = dist;
      }
    }
    return best;
  }

  const worlds::NavAutomaton& nav_;
  const StreetGraph& graph_;
  ReconParams params_;
  EdgeMap map_;
};

}  // namespace

ReconResult reconstruct(const std::vector<TokenSeq>& sequences,
                        const worlds::NavAutomaton& nav, const ReconParams& params) {
  Reconstructor r(nav, params);
  ReconResult out;
  out.sequences = sequences.size();
  for (std::size_t i = 0; i < sequences.size(); ++i) {
    for (TokenId a : sequences[i]) {
      if (!nav.alphabet().contains(a)) {
        throw InputError("sequence " + std::to_string(i) + " has a token outside the alphabet");
      }
    }
    std::string reason = r.run(sequences[i]);
    if (!reason.empty()) out.failures.push_back({i, std::move(reason)});
  }
  out.edges = r.edges();
  return out;
}

EdgeCounts classify_edges(const ReconResult& result, const StreetGraph& truth) {
  EdgeCounts c;
  for (const auto& e : result.edges) {
    if (truth.has_edge(e.from, e.to, e.dir)) {
      ++c.true_edges;
    } else {
      ++c.false_edges;
    }
  }
  return c;
}

MapFormat parse_map_format(const std::string& text) {
  if (text == "json") return MapFormat::kJson;
  if (text == "dot") return MapFormat::kDot;
  if (text == "geojson") return MapFormat::kGeoJson;
  throw InputError("unknown map format '" + text + "' (json, dot, geojson)");
}

namespace {

constexpr const char* kMapFormat = "wg-recon-v1";

std::string render_json(const ReconResult& result, const StreetGraph& graph) {
  nlohmann::ordered_json doc;
  doc["format"] = kMapFormat;
  doc["sequences"] = result.sequences;
  doc["failed"] = result.failed();
  auto nodes = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < graph.num_nodes(); ++i) {
    nodes.push_back({{"id", i}, {"x", graph.nodes()[i].x}, {"y", graph.nodes()[i].y}});
  }
  auto edges = nlohmann::ordered_json::array();
  for (const auto& e : result.edges) {
    edges.push_back({{"from", e.from},
                     {"to", e.to},
                     {"dir", std::string(worlds::direction_name(e.dir))},
                     {"true", e.is_true}});
  }
  auto failures = nlohmann::ordered_json::array();
  for (const auto& f : result.failures) {
    failures.push_back({{"index", f.index}, {"reason", f.reason}});
  }
  doc["nodes"] = std::move(nodes);
  doc["edges"] = std::move(edges);
  doc["failures"] = std::move(failures);
  return doc.dump(1) + "\n";
}

std::string render_dot(const ReconResult& result, const StreetGraph& graph) {
  std::ostringstream out;
  out.precision(6);
  out << "digraph reconstruction {\n  node [shape=point];\n";
  for (std::size_t i = 0; i < graph.num_nodes(); ++i) {
    out << "  n" << i << " [pos=\"" << graph.nodes()[i].x * 10.0 << ','
        << graph.nodes()[i].y * 10.0 << "!\"];\n";
  }
  for (const auto& e : result.edges) {
    out << "  n" << e.from << " -> n" << e.to << " [label=\""
        << worlds::direction_name(e.dir) << "\", color=" << (e.is_true ? "black" : "red")
        << "];\n";
  }
  out << "}\n";
  return out.str();
}

std::string render_geojson(const ReconResult& result, const StreetGraph& graph) {
  nlohmann::ordered_json doc;
  doc["type"] = "FeatureCollection";
  auto features = nlohmann::ordered_json::array();
  auto point = [&](NodeId u) {
    return nlohmann::ordered_json::array({graph.nodes()[u].x, graph.nodes()[u].y});
  };
  for (NodeId u = 0; u < graph.num_nodes(); ++u) {
    nlohmann::ordered_json f;
    f["type"] = "Feature";
    f["geometry"] = {{"type", "Point"}, {"coordinates", point(u)}};
    f["properties"] = {{"id", u}};
    features.push_back(std::move(f));
  }
  for (const auto& e : result.edges) {
    nlohmann::ordered_json f;
    f["type"] = "Feature";
    f["geometry"] = {{"type", "LineString"},
                     {"coordinates", nlohmann::ordered_json::array({point(e.from), point(e.to)})}};
    f["properties"] = {{"from", e.from},
                       {"to", e.to},
                       {"dir", std::string(worlds::direction_name(e.dir))},
                       {"false_edge", !e.is_true}};
    features.push_back(std::move(f));
  }
  doc["features"] = std::move(features);
  return doc.dump(1) + "\n";
}

}  // namespace

std::string render_map(const ReconResult& result, const StreetGraph& graph, MapFormat format) {
  switch (format) {
    case MapFormat::kJson: return render_json(result, graph);
    case MapFormat::kDot: return render_dot(result, graph);
    case MapFormat::kGeoJson: return render_geojson(result, graph);
  }
  throw InternalError("unhandled map format");
}

void export_map(const ReconResult& result, const StreetGraph& graph, MapFormat format,
                const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << render_map(result, graph, format);
  if (!out) throw IoError("write to '" + path + "' failed");
}

ReconResult load_map_json(const std::string& text) {
  try {
    const auto doc = nlohmann::json::parse(text);
    if (doc.at("format") != kMapFormat) throw InputError("not a reconstruction map document");
    ReconResult r;
    r.sequences = doc.at("sequences").get<std::size_t>();
    for (const auto& e : doc.at("edges")) {
      const auto d = worlds::parse_direction(e.at("dir").get<std::string>());
      if (!d) throw InputError("unknown direction in map document");
      r.edges.push_back({e.at("from").get<NodeId>(), e.at("to").get<NodeId>(), *d,
                         e.at("true").get<bool>()});
    }
    for (const auto& f : doc.at("failures")) {
      r.failures.push_back({f.at("index").get<std::size_t>(), f.at("reason").get<std::string>()});
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed map document: ") + e.what());
  }
}

}  // namespace worldgauge::reconstruct
