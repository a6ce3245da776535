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
#include <optional>
#include <string>
#include <vector>

namespace worldgauge::cli {

struct WorldSpec {
  std::string kind = "grid";  // grid | graph | connect4 | othello | seating
  std::string graph;          // graph file for kind = graph
  std::int64_t rows = 20;
  std::int64_t cols = 20;
  double one_way_fraction = 0.3;
  double diagonal_fraction = 0.05;
  double spacing = 0.1;
  std::int64_t max_out_degree = 4;
  std::int64_t size = 4;  // Connect-4 column height, or seating people
  std::int64_t pool_games = 1000;
  std::int64_t max_directions = 99;
  friend bool operator==(const WorldSpec&, const WorldSpec&) = default;
};

struct ModelSpec {
  // exact | exact-weighted | uniform | random | corrupted | ngram | bridge |
  // exact-judge
  std::string kind = "exact";
  std::string label;  // report row label; defaults to the kind
  std::string path;   // n-gram file
  double corruption = 0.2;
  double favoured = 4.0;
  double logit_scale = 1.0;
  std::string bridge_cmd;
  std::string bridge_tcp;
  double timeout = 30.0;  // seconds per bridge request
  friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

struct MetricSpec {
  std::string rule = "epsilon=0.01";
  // "auto", or a comma list of next_token, compression, distinction, task
  std::string metrics = "auto";
  std::int64_t next_token_prefixes = 1000;
  std::int64_t states = 100;
  std::int64_t pairs = 100;
  std::int64_t samples = 30;
  std::int64_t max_len = 0;  // 0 = world default
  std::string boundary = "default";  // default | exact | sampled
  std::int64_t depth = 5;
  std::int64_t boundary_samples = 30;
  std::int64_t continuations = 5;
  std::int64_t judge_samples = 5;
  std::int64_t task_instances = 100;
  std::vector<std::string> sweep;  // "key=v1,v2,..."
  friend bool operator==(const MetricSpec&, const MetricSpec&) = default;
};

struct DataSpec {
  std::string mode = "shortest";  // shortest | noisy | random-walk
  std::int64_t count = 1000;
  double test_fraction = 0.2;
  std::int64_t weight_functions = 50;
  std::int64_t min_walk = 3;
  std::int64_t max_walk = 100;
  std::string corpus;
  std::string heldout;
  std::int64_t order = 2;
  double lambda = 0.01;
  friend bool operator==(const DataSpec&, const DataSpec&) = default;
};

struct ReconSpec {
  std::int64_t max_degree = 4;
  double max_distance = 0.5;
  std::string format = "json";  // json | dot | geojson
  std::string source = "corpus";  // corpus | model
  std::string decoding = "sample";  // greedy | sample
  std::int64_t count = 1000;
  friend bool operator==(const ReconSpec&, const ReconSpec&) = default;
};

struct DetourSpec {
  std::vector<double> probabilities = {0.0, 0.01, 0.1, 0.5, 0.75};
  std::string modes = "random,adversarial";
  std::int64_t trials = 100;
  std::int64_t max_len = 100;
  friend bool operator==(const DetourSpec&, const DetourSpec&) = default;
};

// Everything a command needs. Loaded from TOML, then overridden by flags.
struct RunConfig {
  std::optional<std::int64_t> seed;
  std::int64_t workers = 1;
  std::string out = "out";
  WorldSpec world;
  ModelSpec model;
  MetricSpec metrics;
  DataSpec data;
  ReconSpec reconstruct;
  DetourSpec detour;
  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

// TOML with one table per section ([world], [model], ...). Unknown keys
// and mistyped values raise InputError naming the key.
RunConfig config_from_toml(const std::string& text);
RunConfig load_config(const std::string& path);
// Every field, in schema order. config_from_toml(config_to_toml(c)) == c.
std::string config_to_toml(const RunConfig& config);

// Applies "section.key=value" (or "key=value" for top-level keys).
void apply_override(RunConfig& config, const std::string& assignment);

// Dotted names of every field, for help output.
std::vector<std::string> config_keys();

}  // namespace worldgauge::cli
