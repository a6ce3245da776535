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

#include "worldgauge/worlds/traversals.hpp"

#include <fstream>
#include <limits>
#include <queue>
#include <random>
#include <set>

#include "worldgauge/core/errors.hpp"
#include "worldgauge/core/rng.hpp"

namespace worldgauge::worlds {

std::string to_string(TraversalMode mode) {
  switch (mode) {
    case TraversalMode::kShortest: return "shortest";
    case TraversalMode::kNoisyShortest: return "noisy_shortest";
    case TraversalMode::kRandomWalk: return "random_walk";
  }
  return "?";
}

TraversalMode parse_traversal_mode(const std::string& text) {
  if (text == "shortest") return TraversalMode::kShortest;
  if (text == "noisy_shortest" || text == "noisy") return TraversalMode::kNoisyShortest;
  if (text == "random_walk" || text == "random") return TraversalMode::kRandomWalk;
  throw InputError("unknown traversal mode '" + text + "'");
}

std::optional<std::vector<Direction>> dijkstra_path(const StreetGraph& graph, NodeId origin,
                                                    NodeId dest,
                                                    const std::vector<double>& weights) {
  const std::size_t n = graph.num_nodes();
  if (origin >= n || dest >= n) throw InputError("dijkstra: node id out of range");
  if (weights.size() != graph.num_edges()) throw InputError("dijkstra: weight count mismatch");
  constexpr double kInf = std::numeric_limits<double>::infinity();
  constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  std::vector<double> dist(n, kInf);
  std::vector<std::size_t> via(n, kNone);
  std::vector<bool> settled(n, false);
  using Item = std::pair<double, NodeId>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  dist[origin] = 0.0;
  heap.emplace(0.0, origin);
  while (!heap.empty()) {
    const auto [d, u] = heap.top();
    heap.pop();
    if (settled[u]) continue;
    settled[u] = true;
    if (u == dest) break;
    for (std::size_t i : graph.out_edges(u)) {
      const Edge& e = graph.edges()[i];
      const double nd = d + weights[i];
      if (nd < dist[e.to]) {
        dist[e.to] = nd;
        via[e.to] = i;
        heap.emplace(nd, e.to);
      }
    }
  }
  if (dist[dest] == kInf) return std::nullopt;
  std::vector<Direction> dirs;
  for (NodeId v = dest; v != origin;) {
    const Edge& e = graph.edges()[via[v]];
    dirs.push_back(e.dir);
    v = e.from;
  }
  return std::vector<Direction>(dirs.rbegin(), dirs.rend());
}

std::vector<Traversal> gen_traversals(const StreetGraph& graph, const TraversalParams& p,
                                      std::uint64_t seed) {
  const std::size_t n = graph.num_nodes();
  if (n < 2) throw InputError("traversals need at least two nodes");
  if (p.min_walk > p.max_walk) throw InputError("random-walk length range is empty");
  Rng rng = make_rng(seed);

  std::vector<double> base(graph.num_edges());
  for (std::size_t i = 0; i < base.size(); ++i) base[i] = graph.edges()[i].weight;
  std::vector<std::vector<double>> noisy;
  if (p.mode == TraversalMode::kNoisyShortest) {
    if (p.weight_functions == 0) throw InputError("noisy mode needs at least one weight function");
    noisy.resize(p.weight_functions, base);
    for (auto& w : noisy) {
      for (std::size_t i = 0; i < w.size(); ++i) {
        std::gamma_distribution<double> traffic(base[i], 1.0);
        w[i] += traffic(rng);
      }
    }
  }

  std::set<Traversal> seen;
  std::vector<Traversal> out;
  const std::size_t budget = p.count * p.draws_per_sequence;
  for (std::size_t draw = 0; draw < budget && out.size() < p.count; ++draw) {
    Traversal t;
    if (p.mode == TraversalMode::kRandomWalk) {
      t.origin = static_cast<NodeId>(uniform_index(rng, n));
      const auto len = static_cast<std::size_t>(
          uniform_int(rng, static_cast<std::int64_t>(p.min_walk),
                      static_cast<std::int64_t>(p.max_walk)));
      NodeId u = t.origin;
      for (std::size_t k = 0; k < len; ++k) {
        const auto outs = graph.out_edges(u);
        if (outs.empty()) break;
        const Edge& e = graph.edges()[outs[uniform_index(rng, outs.size())]];
        t.dirs.push_back(e.dir);
        u = e.to;
      }
      t.dest = u;
    } else {
      t.origin = static_cast<NodeId>(uniform_index(rng, n));
      t.dest = static_cast<NodeId>(uniform_index(rng, n - 1));
      if (t.dest >= t.origin) ++t.dest;
      const auto& weights =
          noisy.empty() ? base : noisy[uniform_index(rng, noisy.size())];
      auto path = dijkstra_path(graph, t.origin, t.dest, weights);
      if (!path) continue;
      t.dirs = std::move(*path);
    }
    if (t.dirs.size() > p.max_directions) continue;
    if (!seen.insert(t).second) continue;
    out.push_back(std::move(t));
  }
  return out;
}

std::vector<TokenSeq> encode_traversals(const NavAutomaton& nav,
                                        const std::vector<Traversal>& traversals) {
  std::vector<TokenSeq> out;
  out.reserve(traversals.size());
  for (const auto& t : traversals) out.push_back(nav.encode(t.origin, t.dest, t.dirs));
  return out;
}

CorpusSplit split_by_pair(const std::vector<TokenSeq>& corpus, double test_fraction,
                          std::uint64_t seed) {
  if (!(test_fraction >= 0.0 && test_fraction <= 1.0)) {
    throw InputError("test fraction must lie in [0, 1]");
  }
  CorpusSplit out;
  for (const auto& s : corpus) {
    if (s.size() < 2) {
      out.train.push_back(s);
      continue;
    }
    const std::uint64_t key = (static_cast<std::uint64_t>(s[0]) << 32) | s[1];
    Rng rng = make_rng(derive_seed(seed, key));
    (uniform01(rng) < test_fraction ? out.test : out.train).push_back(s);
  }
  return out;
}

void write_corpus(const std::string& path, const Alphabet& alphabet,
                  const std::vector<TokenSeq>& corpus) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  for (const auto& s : corpus) out << automata::render(alphabet, s) << '\n';
  if (!out) throw IoError("write to '" + path + "' failed");
}

std::vector<TokenSeq> read_corpus(const std::string& path, const Alphabet& alphabet) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::vector<TokenSeq> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(automata::parse_tokens(alphabet, line));
    } catch (const InputError& e) {
      throw InputError(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace worldgauge::worlds
