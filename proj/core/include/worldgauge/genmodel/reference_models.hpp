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
#include <functional>
#include <memory>
#include <vector>

#include "worldgauge/automata/automaton.hpp"
#include "worldgauge/genmodel/model.hpp"

namespace worldgauge::genmodel {

// Optional preference over valid tokens, weight(state, token) > 0. Used to
// steer an exact model (e.g. toward a destination) without changing which
// tokens receive positive probability.
using TokenWeighting = std::function<double(StateId, TokenId)>;

// Exact-next-token model of an automaton: at the state reached by the
// prefix, probability mass is spread over the valid tokens (uniformly, or by
// `weighting`) and is zero elsewhere. Invalid prefixes and dead-end states
// yield the terminal distribution.
ModelHandle make_exact_dfa_model(std::shared_ptr<const automata::Automaton> world,
                                 TokenWeighting weighting = {});

// m(a | s) = 1 / |Sigma| for every prefix.
ModelHandle make_uniform_model(const Alphabet& alphabet);

// Stand-in for an untrained network: softmax of pseudo-random Gaussian
// logits hashed from (seed, prefix, token). Deterministic per prefix.
ModelHandle make_random_logit_model(const Alphabet& alphabet, std::uint64_t seed,
                                    double logit_scale = 1.0);

// Exact model that mislabels tokens. With probability corruption_prob a
// token the exact model would emit from `relabel_pool` is replaced by a
// uniformly chosen other pool token, valid or not. The model keeps a hidden
// position in the automaton: a valid emitted token is followed literally; an
// invalid one is attributed to a valid pool token chosen by hashing
// (seed, position, state, token). An empty pool means every token.
ModelHandle make_corrupted_dfa_model(std::shared_ptr<const automata::Automaton> world,
                                     double corruption_prob, std::uint64_t seed,
                                     std::vector<TokenId> relabel_pool = {},
                                     TokenWeighting weighting = {});

// Exact-automaton judge: accepts(prefix, suffix) iff run(start, prefix) is
// accepting and the suffix is accepted from there.
JudgeHandle make_exact_dfa_judge(std::shared_ptr<const automata::Automaton> world);

}  // namespace worldgauge::genmodel
