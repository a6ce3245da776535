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

#include "worldgauge/cli/builders.hpp"

#include <chrono>

#include "worldgauge/core/errors.hpp"
#include "worldgauge/core/rng.hpp"
#include "worldgauge/genmodel/ngram.hpp"
#include "worldgauge/genmodel/reference_models.hpp"
#include "worldgauge/worlds/connect4.hpp"
#include "worldgauge/worlds/othello.hpp"
#include "worldgauge/worlds/street_graph.hpp"

namespace worldgauge::cli {

namespace {

std::size_t positive(std::int64_t v, const char* what) {
  if (v <= 0) throw InputError(std::string(what) + " must be positive");
  return static_cast<std::size_t>(v);
}

}  // namespace

BuiltWorld build_world(const WorldSpec& spec, std::optional<std::uint64_t> seed) {
  BuiltWorld out;
  if (spec.kind == "grid" || spec.kind == "graph") {
    if (spec.kind == "grid") {
      if (!seed) throw InputError("a grid world needs --seed");
      worlds::GridCityParams p;
      p.rows = positive(spec.rows, "world.rows");
      p.cols = positive(spec.cols, "world.cols");
      p.one_way_fraction = spec.one_way_fraction;
      p.diagonal_fraction = spec.diagonal_fraction;
      p.spacing = spec.spacing;
      p.max_out_degree = positive(spec.max_out_degree, "world.max_out_degree");
      out.graph = std::make_shared<const worlds::StreetGraph>(
          worlds::gen_grid_city(p, derive_seed(*seed, "world")));
    } else {
      if (spec.graph.empty()) throw InputError("world kind 'graph' needs --graph");
      out.graph = std::make_shared<const worlds::StreetGraph>(worlds::load_graph(spec.graph));
    }
    worlds::NavWorldParams np;
    np.max_directions = positive(spec.max_directions, "world.max_directions");
    out.nav = std::make_shared<const worlds::NavWorld>(out.graph, np);
    out.world = out.nav;
  } else if (spec.kind == "connect4") {
    out.world = std::make_shared<const worlds::Connect4World>(positive(spec.size, "world.size"));
  } else if (spec.kind == "othello") {
    worlds::OthelloWorldParams p;
    p.pool_games = positive(spec.pool_games, "world.pool_games");
    p.pool_seed = seed ? derive_seed(*seed, "world") : 0;
    out.world = std::make_shared<const worlds::OthelloWorld>(p);
  } else if (spec.kind == "seating") {
    out.seating = std::make_shared<const worlds::SeatingWorld>(positive(spec.size, "world.size"));
    out.world = out.seating;
  } else {
    throw InputError("unknown world kind '" + spec.kind + "'");
  }
  return out;
}

bridge::TransportFactory bridge_factory(const std::string& cmd, const std::string& tcp) {
  if (cmd.empty() == tcp.empty()) {
    throw InputError("a bridge model needs exactly one of --bridge-cmd and --bridge-tcp");
  }
  if (!cmd.empty()) {
    auto argv = bridge::split_command(cmd);
    if (argv.empty()) throw InputError("--bridge-cmd is empty");
    return [argv] { return bridge::spawn_subprocess(argv); };
  }
  const auto [host, port] = bridge::parse_endpoint(tcp);
  return [host = host, port = port] { return bridge::connect_tcp(host, port); };
}

BuiltModel build_model(const ModelSpec& spec, const BuiltWorld& world, std::uint64_t seed,
                       std::size_t) {
  BuiltModel out;
  out.label = spec.label.empty() ? spec.kind : spec.label;
  const auto automaton = world.world->automaton();
  const auto& alphabet = world.world->alphabet();

  genmodel::TokenWeighting weighting;
  if (world.nav) weighting = world.nav->shortest_path_weighting(spec.favoured);

  if (spec.kind == "exact") {
    out.model = genmodel::make_exact_dfa_model(automaton);
  } else if (spec.kind == "exact-weighted") {
    out.model = genmodel::make_exact_dfa_model(automaton, weighting);
  } else if (spec.kind == "uniform") {
    out.model = genmodel::make_uniform_model(alphabet);
  } else if (spec.kind == "random") {
    out.model = genmodel::make_random_logit_model(alphabet, derive_seed(seed, "model"),
                                                  spec.logit_scale);
  } else if (spec.kind == "corrupted") {
    std::vector<TokenId> pool;
    if (world.nav) {
      for (std::size_t d = 0; d < worlds::kNumDirections; ++d) {
        pool.push_back(world.nav->nav()->direction_token(static_cast<worlds::Direction>(d)));
      }
    }
    out.model = genmodel::make_corrupted_dfa_model(automaton, spec.corruption,
                                                   derive_seed(seed, "model"), pool, weighting);
  } else if (spec.kind == "ngram") {
    if (spec.path.empty()) throw InputError("model kind 'ngram' needs --model-path");
    auto ngram = genmodel::load_ngram(spec.path);
    if (!(ngram->alphabet() == alphabet)) {
      throw InputError("n-gram alphabet in " + spec.path + " differs from the world alphabet");
    }
    out.model = ngram;
  } else if (spec.kind == "exact-judge") {
    out.judge = genmodel::make_exact_dfa_judge(automaton);
  } else if (spec.kind == "bridge") {
    bridge::SessionOptions options;
    if (!(spec.timeout > 0)) throw InputError("model.timeout must be positive");
    options.timeout = std::chrono::milliseconds(static_cast<std::int64_t>(spec.timeout * 1000));
    auto pool = std::make_shared<bridge::SessionPool>(
        bridge_factory(spec.bridge_cmd, spec.bridge_tcp), alphabet, options);
    const auto& caps = pool->capabilities();
    const auto has = [&](std::string_view c) {
      return std::find(caps.begin(), caps.end(), c) != caps.end();
    };
    if (has(bridge::kCapNextDist)) {
      out.model = std::make_shared<const bridge::RemoteModel>(pool, out.label);
    }
    if (has(bridge::kCapAccepts)) out.judge = std::make_shared<const bridge::RemoteJudge>(pool);
  } else {
    throw InputError("unknown model kind '" + spec.kind + "'");
  }
  return out;
}

}  // namespace worldgauge::cli
