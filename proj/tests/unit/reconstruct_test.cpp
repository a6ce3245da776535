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

#include <cstdlib>
#include <nlohmann/json.hpp>
#include <set>

#include "fixtures.hpp"
#include "worldgauge/core/errors.hpp"
#include "worldgauge/reconstruct/reconstruct.hpp"
#include "worldgauge/worlds/traversals.hpp"

namespace worldgauge::reconstruct {
namespace {

using worlds::Edge;
using worlds::Node;

// A=0 (0,0), B=1 (0.1,0), C=2 (0.2,0), D=3 (0.1,0.1).
// Two-way streets A-B and B-C running east-west, and B-D north-south.
std::shared_ptr<const StreetGraph> tee_graph() {
  std::vector<Node> nodes = {{0, 0}, {0.1, 0}, {0.2, 0}, {0.1, 0.1}};
  std::vector<Edge> edges = {
      {0, 1, 0.1, Direction::kE}, {1, 0, 0.1, Direction::kW}, {1, 2, 0.1, Direction::kE},
      {2, 1, 0.1, Direction::kW}, {1, 3, 0.1, Direction::kN}, {3, 1, 0.1, Direction::kS}};
  return std::make_shared<StreetGraph>(nodes, edges);
}

std::shared_ptr<const StreetGraph> grid(std::size_t n, std::uint64_t seed) {
  worlds::GridCityParams p;
  p.rows = n;
  p.cols = n;
  return std::make_shared<const StreetGraph>(worlds::gen_grid_city(p, seed));
}

TokenSeq route(const worlds::NavAutomaton& nav, NodeId o, NodeId d,
               std::vector<Direction> dirs) {
  return nav.encode(o, d, dirs);
}

TEST(Reconstruct, ValidCorpusAddsOnlyTrueEdges) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto g = grid(8, seed);
    const worlds::NavAutomaton nav(g);
    for (auto mode : {worlds::TraversalMode::kShortest, worlds::TraversalMode::kRandomWalk}) {
      worlds::TraversalParams tp;
      tp.mode = mode;
      tp.count = 500;
      const auto corpus = worlds::encode_traversals(nav, worlds::gen_traversals(*g, tp, seed));
      const auto r = reconstruct(corpus, nav, {});
      EXPECT_EQ(r.failed(), 0u);
      EXPECT_EQ(r.sequences, 500u);
      EXPECT_EQ(classify_edges(r, *g).false_edges, 0u);
      for (const auto& e : r.edges) EXPECT_TRUE(g->has_edge(e.from, e.to, e.dir));
    }
  }
}

TEST(Reconstruct, SaturatedNodeFailsOnce) {
  const auto g = tee_graph();
  const worlds::NavAutomaton nav(g);
  ReconParams p;
  p.max_degree = 1;
  const std::vector<TokenSeq> corpus = {
      route(nav, 0, 1, {Direction::kE}),   // uses A's only slot
      route(nav, 0, 3, {Direction::kN}),   // needs a second edge out of A
      route(nav, 1, 2, {Direction::kE})};
  const auto r = reconstruct(corpus, nav, p);
  ASSERT_EQ(r.failed(), 1u);
  EXPECT_EQ(r.failures[0].index, 1u);
  EXPECT_NE(r.failures[0].reason.find("degree"), std::string::npos);
}

TEST(Reconstruct, GreedyChoosesLongestContinuation) {
  const auto g = tee_graph();
  const worlds::NavAutomaton nav(g);
  // "N" from A has no street. Only B lets the following "E" continue.
  const auto r = reconstruct({route(nav, 0, 2, {Direction::kN, Direction::kE})}, nav, {});
  ASSERT_EQ(r.failed(), 0u);
  EXPECT_EQ(r.edges, (std::vector<ReconEdge>{{0, 1, Direction::kN, false},
                                             {1, 2, Direction::kE, true}}));
  const auto counts = classify_edges(r, *g);
  EXPECT_EQ(counts.true_edges, 1u);
  EXPECT_EQ(counts.false_edges, 1u);
}

TEST(Reconstruct, TiesGoToTheNearestThenLowestId) {
  // Nothing follows the invented step, so every candidate scores zero
  // continuation steps and the nearest node wins.
  const auto g = tee_graph();
  const worlds::NavAutomaton nav(g);
  const auto r = reconstruct({route(nav, 2, 3, {Direction::kS})}, nav, {});
  // From C (0.2,0): B is 0.1 away, D about 0.141, A 0.2 away.
  ASSERT_FALSE(r.edges.empty());
  EXPECT_EQ(r.edges[0], (ReconEdge{2, 1, Direction::kS, false}));
  EXPECT_EQ(r.failed(), 1u);  // the walk ends at B, not D
}

TEST(Reconstruct, DistanceLimitCanLeaveNoCandidate) {
  const auto g = tee_graph();
  const worlds::NavAutomaton nav(g);
  ReconParams p;
  p.max_edge_distance = 0.05;
  const auto r = reconstruct({route(nav, 0, 1, {Direction::kN})}, nav, p);
  ASSERT_EQ(r.failed(), 1u);
  EXPECT_NE(r.failures[0].reason.find("no candidate"), std::string::npos);
}

TEST(Reconstruct, MalformedSequencesAreCountedWithReasons) {
  const auto g = tee_graph();
  const worlds::NavAutomaton nav(g);
  const TokenId e = nav.direction_token(Direction::kE);
  const std::vector<TokenSeq> corpus = {
      {0, 1},                         // too short
      {e, 1, nav.end_token()},        // header is not two nodes
      {0, 1, e},                      // no end token
      {0, 2, e, 1, nav.end_token()},  // node token among directions
      route(nav, 0, 2, {Direction::kE})};  // walk stops at B
  const auto r = reconstruct(corpus, nav, {});
  ASSERT_EQ(r.failed(), 5u);
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_EQ(r.failures[i].index, i);
    EXPECT_FALSE(r.failures[i].reason.empty());
  }
  EXPECT_THROW(reconstruct({{0, 1, 999}}, nav, {}), InputError);
  ReconParams bad;
  bad.max_degree = 9;
  EXPECT_THROW(reconstruct({}, nav, bad), InputError);
  bad.max_degree = 4;
  bad.max_edge_distance = 0;
  EXPECT_THROW(reconstruct({}, nav, bad), InputError);
}

TEST(Reconstruct, DirectionSlotsStayUniqueAndResultIsDeterministic) {
  const auto g = grid(6, 3);
  const worlds::NavAutomaton nav(g);
  Rng rng = make_rng(4);
  std::vector<TokenSeq> corpus;
  for (int i = 0; i < 400; ++i) {
    // Random direction strings: mostly invalid, exercising invented edges.
    std::vector<Direction> dirs(1 + uniform_index(rng, 8));
    for (auto& d : dirs) d = static_cast<Direction>(uniform_index(rng, 8));
    corpus.push_back(route(nav, static_cast<NodeId>(uniform_index(rng, 36)),
                           static_cast<NodeId>(uniform_index(rng, 36)), dirs));
  }
  const auto a = reconstruct(corpus, nav, {});
  const auto b = reconstruct(corpus, nav, {});
  EXPECT_EQ(a.edges, b.edges);
  ASSERT_EQ(a.failed(), b.failed());
  std::set<std::pair<NodeId, Direction>> slots;
  std::set<std::pair<NodeId, NodeId>> pairs;
  std::map<NodeId, std::size_t> degree;
  for (const auto& e : a.edges) {
    EXPECT_TRUE(slots.insert({e.from, e.dir}).second);
    EXPECT_TRUE(pairs.insert({e.from, e.to}).second);
    EXPECT_LE(++degree[e.from], 4u);
    EXPECT_EQ(e.is_true, g->has_edge(e.from, e.to, e.dir));
  }
  EXPECT_TRUE(std::is_sorted(a.edges.begin(), a.edges.end(), [](const auto& x, const auto& y) {
    return std::tie(x.from, x.to) < std::tie(y.from, y.to);
  }));
  EXPECT_GT(classify_edges(a, *g).false_edges, 0u);
}

TEST(ClassifyEdges, PlantedAndFabricatedLabels) {
  const auto g = tee_graph();
  ReconResult r;
  r.edges = {{0, 1, Direction::kE, true},
             {1, 0, Direction::kN, false},  // planted wrong label
             {1, 2, Direction::kE, true},
             {1, 3, Direction::kSE, false}};  // planted wrong label
  auto c = classify_edges(r, *g);
  EXPECT_EQ(c.true_edges, 2u);
  EXPECT_EQ(c.false_edges, 2u);
  ReconResult fake;
  fake.edges = {{0, 2, Direction::kE, false}, {2, 0, Direction::kW, false},
                {3, 0, Direction::kSW, false}};
  c = classify_edges(fake, *g);
  EXPECT_EQ(c.false_edges, 3u);
  EXPECT_EQ(c.true_edges, 0u);
}

class MapExport : public ::testing::Test {
 protected:
  void SetUp() override {
    graph_ = tee_graph();
    const worlds::NavAutomaton nav(graph_);
    result_ = reconstruct({route(nav, 0, 2, {Direction::kN, Direction::kE}), {0, 1}}, nav, {});
  }
  std::shared_ptr<const StreetGraph> graph_;
  ReconResult result_;
};

TEST_F(MapExport, JsonRoundTripPreservesEdgesAndFailures) {
  const std::string text = render_map(result_, *graph_, MapFormat::kJson);
  const auto back = load_map_json(text);
  EXPECT_EQ(back.edges, result_.edges);
  EXPECT_EQ(back.sequences, result_.sequences);
  ASSERT_EQ(back.failed(), result_.failed());
  EXPECT_EQ(back.failures[0].reason, result_.failures[0].reason);
  EXPECT_EQ(render_map(back, *graph_, MapFormat::kJson), text);
  EXPECT_THROW(load_map_json("{\"format\":\"x\"}"), InputError);
}

TEST_F(MapExport, GeoJsonFlagsFalseEdges) {
  const auto doc = nlohmann::json::parse(render_map(result_, *graph_, MapFormat::kGeoJson));
  EXPECT_EQ(doc["type"], "FeatureCollection");
  std::size_t lines = 0, flagged = 0;
  for (const auto& f : doc["features"]) {
    if (f["geometry"]["type"] == "LineString") {
      ++lines;
      flagged += f["properties"]["false_edge"].get<bool>();
    }
  }
  EXPECT_EQ(lines, 2u);
  EXPECT_EQ(flagged, 1u);
}

TEST_F(MapExport, EmptyResultGivesValidDocuments) {
  const ReconResult empty;
  const auto json = nlohmann::json::parse(render_map(empty, *graph_, MapFormat::kJson));
  EXPECT_TRUE(json["edges"].empty());
  const auto geo = nlohmann::json::parse(render_map(empty, *graph_, MapFormat::kGeoJson));
  EXPECT_EQ(geo["features"].size(), 4u);
  EXPECT_TRUE(load_map_json(json.dump()).edges.empty());
}

TEST_F(MapExport, DotParsesWithPydot) {
  fixtures::TempDir dir;
  const ReconResult empty;
  for (const ReconResult* r : std::vector<const ReconResult*>{&result_, &empty}) {
    const ReconResult& res = *r;
    const std::string path = dir.file("map.dot");
    export_map(res, *graph_, MapFormat::kDot, path);
    const std::string cmd = "python3 " WORLDGAUGE_PYTHON_DIR "/check_dot.py " + path + " 4 " +
                            std::to_string(res.edges.size()) + " 2>&1";
    const int status = std::system(cmd.c_str());
    if (status == -1 || WEXITSTATUS(status) == 127 || WEXITSTATUS(status) == 77) {
      GTEST_SKIP() << "python3 with pydot is not available";
    }
    EXPECT_EQ(WEXITSTATUS(status), 0) << fixtures::read_file(path);
  }
}

TEST_F(MapExport, FormatsAndIoErrors) {
  EXPECT_EQ(parse_map_format("geojson"), MapFormat::kGeoJson);
  EXPECT_THROW(parse_map_format("svg"), InputError);
  EXPECT_THROW(export_map(result_, *graph_, MapFormat::kJson, "/nonexistent/dir/m.json"),
               IoError);
  const std::string dot = render_map(result_, *graph_, MapFormat::kDot);
  EXPECT_NE(dot.find("color=red"), std::string::npos);
  EXPECT_EQ(dot, render_map(result_, *graph_, MapFormat::kDot));
}

}  // namespace
}  // namespace worldgauge::reconstruct
