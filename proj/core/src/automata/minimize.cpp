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

#include "worldgauge/automata/minimize.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <set>

namespace worldgauge::automata {

namespace {

constexpr StateId kNone = std::numeric_limits<StateId>::max();

// Reachable states of dfa in increasing id order; the reject state is always
// kept because the trimmed automaton still needs a sink.
std::vector<StateId> trim(const Dfa& dfa) {
  std::vector<bool> seen(dfa.num_states(), false);
  std::deque<StateId> queue{dfa.start()};
  seen[dfa.start()] = true;
  seen[dfa.reject()] = true;
  while (!queue.empty()) {
    const StateId q = queue.front();
    queue.pop_front();
    for (TokenId a = 0; a < dfa.alphabet().size(); ++a) {
      const StateId t = dfa.target(q, a);
      if (!seen[t]) {
        seen[t] = true;
        queue.push_back(t);
      }
    }
  }
  std::vector<StateId> keep;
  for (StateId q = 0; q < dfa.num_states(); ++q) {
    if (seen[q]) keep.push_back(q);
  }
  return keep;
}

}  // namespace

Dfa minimize(const Dfa& dfa) {
  const std::size_t width = dfa.alphabet().size();
  const std::vector<StateId> keep = trim(dfa);
  const std::size_t n = keep.size();

  // Local ids 0..n-1 over kept states, ordered by original id.
  std::vector<StateId> local(dfa.num_states(), kNone);
  for (StateId i = 0; i < n; ++i) local[keep[i]] = i;
  const StateId reject = local[dfa.reject()];

  // inverse[a][t] = local states q with delta(q, a) = t.
  std::vector<std::vector<std::vector<StateId>>> inverse(
      width, std::vector<std::vector<StateId>>(n));
  for (StateId q = 0; q < n; ++q) {
    for (TokenId a = 0; a < width; ++a) {
      inverse[a][local[dfa.target(keep[q], a)]].push_back(q);
    }
  }

  std::vector<std::vector<StateId>> blocks;
  std::vector<std::size_t> block_of(n, 0);
  {
    std::vector<StateId> accepting;
    for (StateId q = 0; q < n; ++q) {
      if (q != reject) accepting.push_back(q);
    }
    blocks.push_back({reject});
    if (!accepting.empty()) blocks.push_back(std::move(accepting));
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      for (StateId q : blocks[b]) block_of[q] = b;
    }
  }

  // Hopcroft worklist of (block, token) splitters.
  std::set<std::pair<std::size_t, TokenId>> pending;
  std::deque<std::pair<std::size_t, TokenId>> work;
  auto push = [&](std::size_t b, TokenId a) {
    if (pending.emplace(b, a).second) work.emplace_back(b, a);
  };
  {
    const std::size_t smaller =
        blocks.size() == 1 ? 0 : (blocks[0].size() <= blocks[1].size() ? 0 : 1);
    for (TokenId a = 0; a < width; ++a) push(smaller, a);
  }

  std::vector<char> marked(n, 0);
  while (!work.empty()) {
    const auto [splitter, a] = work.front();
    work.pop_front();
    pending.erase({splitter, a});

    std::vector<StateId> pre;
    for (StateId t : blocks[splitter]) {
      for (StateId q : inverse[a][t]) {
        if (!marked[q]) {
          marked[q] = 1;
          pre.push_back(q);
        }
      }
    }
    std::vector<std::size_t> touched;
    for (StateId q : pre) touched.push_back(block_of[q]);
    std::sort(touched.begin(), touched.end());
    touched.erase(std::unique(touched.begin(), touched.end()), touched.end());

    for (std::size_t y : touched) {
      std::vector<StateId> inside;
      std::vector<StateId> outside;
      for (StateId q : blocks[y]) (marked[q] ? inside : outside).push_back(q);
      if (outside.empty()) continue;
      const std::size_t fresh = blocks.size();
      blocks[y] = std::move(inside);
      blocks.push_back(std::move(outside));
      for (StateId q : blocks[fresh]) block_of[q] = fresh;
      for (TokenId c = 0; c < width; ++c) {
        if (pending.count({y, c})) {
          push(fresh, c);
        } else {
          push(blocks[y].size() <= blocks[fresh].size() ? y : fresh, c);
        }
      }
    }
    for (StateId q : pre) marked[q] = 0;
  }

  // Canonical numbering by lowest member (members are local ids, which
  // preserve the original id order).
  std::vector<std::size_t> order(blocks.size());
  for (std::size_t b = 0; b < blocks.size(); ++b) order[b] = b;
  std::vector<StateId> lowest(blocks.size());
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    lowest[b] = *std::min_element(blocks[b].begin(), blocks[b].end());
  }
  std::sort(order.begin(), order.end(),
            [&](std::size_t x, std::size_t y) { return lowest[x] < lowest[y]; });
  std::vector<StateId> renumber(blocks.size());
  for (std::size_t i = 0; i < order.size(); ++i) renumber[order[i]] = i;

  std::vector<StateId> table(blocks.size() * width);
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const StateId rep = blocks[b].front();
    for (TokenId a = 0; a < width; ++a) {
      const StateId t = local[dfa.target(keep[rep], a)];
      table[renumber[b] * width + a] = renumber[block_of[t]];
    }
  }
  return Dfa(dfa.alphabet(), blocks.size(), renumber[block_of[local[dfa.start()]]],
             renumber[block_of[reject]], std::move(table));
}

}  // namespace worldgauge::automata
