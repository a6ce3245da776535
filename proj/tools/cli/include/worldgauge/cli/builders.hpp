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
#include <memory>
#include <optional>
#include <string>

#include "worldgauge/bridge/session.hpp"
#include "worldgauge/cli/config.hpp"
#include "worldgauge/genmodel/acceptance.hpp"
#include "worldgauge/genmodel/model.hpp"
#include "worldgauge/worlds/nav_world.hpp"
#include "worldgauge/worlds/seating.hpp"
#include "worldgauge/worlds/world.hpp"

namespace worldgauge::cli {

struct BuiltWorld {
  worlds::WorldHandle world;
  // Set for navigation worlds (kind grid or graph).
  std::shared_ptr<const worlds::StreetGraph> graph;
  std::shared_ptr<const worlds::NavWorld> nav;
  // Set for kind seating.
  std::shared_ptr<const worlds::SeatingWorld> seating;
};

// Grid worlds are generated from derive_seed(seed, "world") and need a
// seed; the other kinds ignore it. Throws InputError for an unknown kind.
BuiltWorld build_world(const WorldSpec& spec, std::optional<std::uint64_t> seed);

struct BuiltModel {
  genmodel::ModelHandle model;  // unset for judge-only models
  genmodel::JudgeHandle judge;  // set when the model can answer accept queries natively
  std::string label;
};

// Model kinds:
//   exact, exact-weighted  exact next-token model (weighted toward shortest
//                          paths on navigation worlds)
//   uniform, random        baselines
//   corrupted              exact model relabelling tokens with prob. corruption
//   ngram                  count model loaded from `path`
//   bridge                 external peer over --bridge-cmd or --bridge-tcp
//   exact-judge            accept/reject oracle of the true automaton
BuiltModel build_model(const ModelSpec& spec, const BuiltWorld& world, std::uint64_t seed,
                       std::size_t workers);

// Transport factory for a bridge endpoint spec. Exactly one of cmd and tcp
// must be non-empty.
bridge::TransportFactory bridge_factory(const std::string& cmd, const std::string& tcp);

}  // namespace worldgauge::cli
