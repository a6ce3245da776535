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

#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "worldgauge/core/errors.hpp"
#include "worldgauge/worlds/nav_world.hpp"
#include "worldgauge/worlds/traversals.hpp"

namespace worldgauge::worlds {
namespace {

std::shared_ptr<const StreetGraph> grid(std::size_t rows, std::size_t cols, std::uint64_t seed,
                                        double one_way = 0.3, double diagonal = 0.05) {
  GridCityParams p;
  p.rows = rows;
  p.cols = cols;
  p.one_way_fraction = one_way;
  p.diagonal_fraction = diagonal;
  return std::make_shared<const StreetGraph>(gen_grid_city(p, seed));
}

double path_length(const StreetGraph& g, NodeId origin, const std::vector<Direction>& dirs) {
  double total = 0.0;
  NodeId u = origin;
  for (Direction d : dirs) {
    const auto e = g.edge_index(u, d);
    EXPECT_TRUE(e.has_value());
    if (!e) return NAN;
    total += g.edges()[*e].weight;
    u = g.edges()[*e].to;
  }
  return total;
}

TEST(StreetGraph, RejectsInvalidEdges) {
  const std::vector<Node> nodes = {{0, 0}, {1, 0}, {2, 0}};
  EXPECT_THROW(StreetGraph(nodes, {{0, 0, 1, Direction::kE}}), InputError);
  EXPECT_THROW(StreetGraph(nodes, {{0, 1, 0, Direction::kE}}), InputError);
  EXPECT_THROW(StreetGraph(nodes, {{0, 5, 1, Direction::kE}}), InputError);
  EXPECT_THROW(StreetGraph(nodes, {{0, 1, 1, Direction::kE}, {0, 2, 2, Direction::kE}}),
               InputError);
  const StreetGraph ok(nodes, {{0, 1, 1, Direction::kE}, {1, 2, 1, Direction::kE}});
  EXPECT_EQ(ok.neighbor(0, Direction::kE), 1u);
  EXPECT_FALSE(ok.neighbor(0, Direction::kW));
  EXPECT_EQ(ok.direction_between(1, 2), Direction::kE);
  EXPECT_FALSE(ok.strongly_connected());
}

TEST(StreetGraph, DirectionNamesAndBearings) {
  for (std::size_t i = 0; i < kNumDirections; ++i) {
    const auto d = static_cast<Direction>(i);
    EXPECT_EQ(parse_direction(direction_name(d)), d);
  }
  EXPECT_FALSE(parse_direction("UP"));
  EXPECT_EQ(bearing_direction(1, 0), Direction::kE);
  EXPECT_EQ(bearing_direction(0, 1), Direction::kN);
  EXPECT_EQ(bearing_direction(-1, -1), Direction::kSW);
  EXPECT_EQ(bearing_direction(1, 1), Direction::kNE);
}

TEST(StreetGraph, JsonRoundTrip) {
  const auto g = grid(4, 5, 3);
  const std::string text = graph_to_json(*g);
  const StreetGraph back = graph_from_json(text);
  EXPECT_EQ(graph_to_json(back), text);
  EXPECT_EQ(back.num_edges(), g->num_edges());
  fixtures::TempDir dir;
  save_graph(*g, dir.file("g.json"));
  EXPECT_EQ(graph_to_json(load_graph(dir.file("g.json"))), text);
  EXPECT_THROW(graph_from_json("[1,2]"), InputError);
  EXPECT_THROW(load_graph(dir.file("missing.json")), IoError);
}

TEST(GridCity, TwoByTwoTwoWayHasEightEdges) {
  const auto g = grid(2, 2, 1, 0.0, 0.0);
  EXPECT_EQ(g->num_nodes(), 4u);
  EXPECT_EQ(g->num_edges(), 8u);
}

TEST(GridCity, StronglyConnectedOverManySeeds) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto g = grid(6, 7, seed, 0.4, 0.1);
    // Independent BFS oracle: hop counts to node 0 and from node 0.
    const auto to0 = g->hops_to(0);
    for (auto h : to0) ASSERT_NE(h, UINT32_MAX) << "seed " << seed;
    const auto from0 = oracle::bellman_ford(*g, 0);
    for (double d : from0) ASSERT_TRUE(std::isfinite(d)) << "seed " << seed;
  }
}

TEST(GridCity, DegreeCapAndBearingLabels) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto g = grid(8, 8, seed, 0.3, 0.3);
    for (NodeId u = 0; u < g->num_nodes(); ++u) EXPECT_LE(g->out_edges(u).size(), 4u);
    for (const auto& e : g->edges()) {
      const auto& a = g->nodes()[e.from];
      const auto& b = g->nodes()[e.to];
      EXPECT_EQ(bearing_direction(b.x - a.x, b.y - a.y), e.dir);
      EXPECT_GT(e.weight, 0.0);
    }
  }
}

TEST(GridCity, DeterministicPerSeed) {
  EXPECT_EQ(graph_to_json(*grid(5, 5, 42)), graph_to_json(*grid(5, 5, 42)));
  EXPECT_NE(graph_to_json(*grid(5, 5, 42)), graph_to_json(*grid(5, 5, 43)));
}

TEST(NavDfa, HeaderThenEnd) {
  const NavAutomaton nav(grid(3, 3, 1));
  for (NodeId o = 0; o < 9; ++o) {
    for (NodeId d = 0; d < 9; ++d) {
      const TokenSeq s = {nav.node_token(o), nav.node_token(d), nav.end_token()};
      EXPECT_EQ(nav.run(nav.start(), s) != nav.reject(), o == d);
    }
  }
}

TEST(NavDfa, TransitionsFollowEdges) {
  const auto g = grid(4, 4, 2);
  const NavAutomaton nav(g);
  for (NodeId u = 0; u < 16; ++u) {
    const StateId q = nav.nav_state(u, 5);
    for (std::size_t i = 0; i < kNumDirections; ++i) {
      const auto d = static_cast<Direction>(i);
      const StateId next = nav.step(q, nav.direction_token(d));
      const auto v = g->neighbor(u, d);
      if (v) {
        EXPECT_EQ(next, nav.nav_state(*v, 5));
      } else {
        EXPECT_EQ(next, nav.reject());
      }
    }
    // A node token after the header is never valid.
    EXPECT_EQ(nav.step(q, nav.node_token(0)), nav.reject());
  }
  EXPECT_EQ(nav.step(nav.nav_state(5, 5), nav.end_token()), nav.terminal());
  for (TokenId a = 0; a < nav.alphabet().size(); ++a) {
    EXPECT_EQ(nav.step(nav.terminal(), a), nav.reject());
  }
  EXPECT_EQ(nav.step(nav.start(), nav.end_token()), nav.reject());
}

TEST(NavDfa, AlphabetLayout) {
  const NavAutomaton nav(grid(2, 3, 1));
  EXPECT_EQ(nav.alphabet().size(), 6u + 9u);
  EXPECT_EQ(nav.alphabet().name(nav.direction_token(Direction::kSW)), "SW");
  EXPECT_EQ(nav.alphabet().name(nav.end_token()), "end");
}

TEST(NavDfa, StateCountIsNodesSquaredPlusOne) {
  const NavAutomaton nav(grid(4, 4, 5));
  std::size_t nav_or_terminal = 0;
  for (StateId q : automata::reachable_states(nav)) {
    if (nav.is_nav_state(q) || q == nav.terminal()) ++nav_or_terminal;
  }
  EXPECT_EQ(nav_or_terminal, 16u * 16u + 1u);
}

TEST(NavDfa, DijkstraPathsReplayToTerminal) {
  const auto g = grid(6, 6, 8);
  const NavAutomaton nav(g);
  std::vector<double> w;
  for (const auto& e : g->edges()) w.push_back(e.weight);
  Rng rng = make_rng(1);
  for (int i = 0; i < 100; ++i) {
    const auto o = static_cast<NodeId>(uniform_index(rng, 36));
    const auto d = static_cast<NodeId>(uniform_index(rng, 36));
    const auto path = dijkstra_path(*g, o, d, w);
    ASSERT_TRUE(path);
    EXPECT_EQ(nav.run(nav.start(), nav.encode(o, d, *path)), nav.terminal());
  }
}

TEST(PrefixSampler, ReplaysToTheRequestedState) {
  const NavWorld world(grid(6, 6, 3));
  Rng rng = make_rng(2);
  const auto& nav = *world.nav();
  for (int i = 0; i < 1000; ++i) {
    const StateId q = world.sample_state(rng);
    ASSERT_TRUE(nav.is_nav_state(q));
    const TokenSeq s = world.sample_prefix(q, rng);
    EXPECT_EQ(nav.run(nav.start(), s), q);
    EXPECT_LE(s.size() - 2 + nav.hops(nav.nav_position(q).first, nav.nav_position(q).second),
              99u);
  }
}

TEST(PrefixSampler, ZeroLengthWalkIsTheHeader) {
  NavWorldParams params;
  const auto g = grid(3, 3, 4);
  // With a direction budget equal to the hop distance the walk length is 0.
  const NavAutomaton probe(g);
  params.max_directions = probe.hops(0, 8);
  const NavWorld world(g, params);
  Rng rng = make_rng(3);
  const TokenSeq s = world.sample_prefix(world.nav()->nav_state(0, 8), rng);
  EXPECT_EQ(s, (TokenSeq{world.nav()->node_token(0), world.nav()->node_token(8)}));
}

TEST(PrefixSampler, IndependentDrawsUsuallyDiffer) {
  const NavWorld world(grid(5, 5, 6));
  Rng rng = make_rng(4);
  int same = 0;
  for (int i = 0; i < 500; ++i) {
    const StateId q = world.sample_state(rng);
    if (world.sample_prefix(q, rng) == world.sample_prefix(q, rng)) ++same;
  }
  EXPECT_LT(same, 25);
}

TEST(PrefixSampler, UnreachableDestinationThrows) {
  NavWorldParams params;
  params.max_directions = 1;
  const NavWorld world(grid(5, 5, 7), params);
  Rng rng = make_rng(5);
  EXPECT_THROW(world.sample_prefix(world.nav()->nav_state(0, 24), rng), DomainError);
}

TEST(PrefixSampler, PairsShareAState) {
  const NavWorld world(grid(5, 5, 8));
  Rng rng = make_rng(6);
  const auto& nav = *world.nav();
  for (int i = 0; i < 200; ++i) {
    const StateId q = world.sample_state(rng);
    const auto pair = world.sample_prefix_pair(q, rng);
    ASSERT_TRUE(pair);
    EXPECT_NE(pair->first, pair->second);
    EXPECT_EQ(nav.run(nav.start(), pair->first), q);
    EXPECT_EQ(nav.run(nav.start(), pair->second), q);
  }
}

TEST(Traversals, TwoNodeShortestPathIsTheEdge) {
  const auto g = std::make_shared<const StreetGraph>(
      std::vector<Node>{{0, 0}, {1, 0}},
      std::vector<Edge>{{0, 1, 1, Direction::kE}, {1, 0, 1, Direction::kW}});
  const auto path = dijkstra_path(*g, 0, 1, {1.0, 1.0});
  ASSERT_TRUE(path);
  EXPECT_EQ(*path, (std::vector<Direction>{Direction::kE}));
  EXPECT_TRUE(dijkstra_path(*g, 0, 0, {1.0, 1.0})->empty());
}

TEST(Traversals, DijkstraMatchesBellmanFord) {
  Rng rng = make_rng(9);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto base = grid(5, 10, seed, 0.4, 0.2);
    std::vector<Edge> edges = base->edges();
    for (auto& e : edges) e.weight = 0.05 + uniform01(rng);
    const StreetGraph g(base->nodes(), edges);
    std::vector<double> w;
    for (const auto& e : g.edges()) w.push_back(e.weight);
    for (NodeId o = 0; o < 50; o += 7) {
      const auto dist = oracle::bellman_ford(g, o);
      for (NodeId d = 0; d < 50; ++d) {
        const auto path = dijkstra_path(g, o, d, w);
        ASSERT_TRUE(path);
        EXPECT_NEAR(path_length(g, o, *path), dist[d], 1e-9);
      }
    }
  }
}

TEST(Traversals, CorporaAreValidUniqueAndCapped) {
  const auto g = grid(6, 6, 10);
  const NavAutomaton nav(g);
  for (auto mode : {TraversalMode::kShortest, TraversalMode::kNoisyShortest,
                    TraversalMode::kRandomWalk}) {
    TraversalParams p;
    p.mode = mode;
    p.count = 300;
    p.weight_functions = 5;
    const auto ts = gen_traversals(*g, p, 11);
    EXPECT_EQ(ts.size(), 300u) << to_string(mode);
    EXPECT_EQ(std::set<Traversal>(ts.begin(), ts.end()).size(), ts.size());
    for (const auto& seq : encode_traversals(nav, ts)) {
      EXPECT_EQ(nav.run(nav.start(), seq), nav.terminal());
      EXPECT_LT(seq.size() - 3, 100u);
    }
    if (mode == TraversalMode::kRandomWalk) {
      for (const auto& t : ts) {
        EXPECT_GE(t.dirs.size(), 3u);
        EXPECT_LE(t.dirs.size(), 100u);
      }
    }
  }
}

TEST(Traversals, NoisyPathsAreNeverShorterThanShortest) {
  const auto g = grid(6, 6, 12);
  TraversalParams p;
  p.mode = TraversalMode::kNoisyShortest;
  p.count = 200;
  p.weight_functions = 10;
  for (const auto& t : gen_traversals(*g, p, 13)) {
    const auto dist = oracle::bellman_ford(*g, t.origin);
    EXPECT_GE(path_length(*g, t.origin, t.dirs) + 1e-9, dist[t.dest]);
  }
}

TEST(Traversals, DeterministicPerSeed) {
  const auto g = grid(5, 5, 14);
  TraversalParams p;
  p.mode = TraversalMode::kNoisyShortest;
  p.count = 100;
  EXPECT_EQ(gen_traversals(*g, p, 1), gen_traversals(*g, p, 1));
  EXPECT_NE(gen_traversals(*g, p, 1), gen_traversals(*g, p, 2));
  EXPECT_THROW(parse_traversal_mode("teleport"), InputError);
  EXPECT_EQ(parse_traversal_mode(to_string(TraversalMode::kRandomWalk)),
            TraversalMode::kRandomWalk);
}

TEST(Traversals, SplitKeepsPairsDisjoint) {
  const auto g = grid(6, 6, 15);
  const NavAutomaton nav(g);
  TraversalParams p;
  p.mode = TraversalMode::kRandomWalk;
  p.count = 2000;
  const auto corpus = encode_traversals(nav, gen_traversals(*g, p, 16));
  const auto split = split_by_pair(corpus, 0.2, 17);
  EXPECT_EQ(split.train.size() + split.test.size(), corpus.size());
  std::set<std::pair<TokenId, TokenId>> train_pairs;
  for (const auto& s : split.train) train_pairs.insert({s[0], s[1]});
  for (const auto& s : split.test) EXPECT_FALSE(train_pairs.count({s[0], s[1]}));
  const double frac = static_cast<double>(split.test.size()) / corpus.size();
  EXPECT_GT(frac, 0.1);
  EXPECT_LT(frac, 0.3);
}

TEST(Traversals, CorpusFileRoundTrip) {
  const auto g = grid(4, 4, 18);
  const NavAutomaton nav(g);
  TraversalParams p;
  p.count = 50;
  const auto corpus = encode_traversals(nav, gen_traversals(*g, p, 19));
  fixtures::TempDir dir;
  write_corpus(dir.file("c.txt"), nav.alphabet(), corpus);
  EXPECT_EQ(read_corpus(dir.file("c.txt"), nav.alphabet()), corpus);
  const std::string text = fixtures::read_file(dir.file("c.txt"));
  EXPECT_EQ(static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')), 50u);
  fixtures::write_file(dir.file("bad.txt"), "0 1 UP end\n");
  EXPECT_THROW(read_corpus(dir.file("bad.txt"), nav.alphabet()), InputError);
}

}  // namespace
}  // namespace worldgauge::worlds
