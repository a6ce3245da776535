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

#include "worldgauge/automata/dfa.hpp"

namespace worldgauge::automata {

// Minimal DFA for the same language. Unreachable states are dropped, then
// Hopcroft partition refinement merges equivalent states starting from the
// partition {F, {reject}}. Output state ids are assigned to blocks in
// increasing order of the lowest original state id they contain, so the
// result is deterministic.
Dfa minimize(const Dfa& dfa);

}  // namespace worldgauge::automata
