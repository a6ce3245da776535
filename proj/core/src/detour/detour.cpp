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

#include "worldgauge/detour/detour.hpp"

#include <atomic>
#include <set>

#include <spdlog/spdlog.h>

#include "worldgauge/core/errors.hpp"
#include "worldgauge/core/parallel.hpp"

namespace worldgauge::detour {

std::string to_string(DetourMode mode) {
  return mode == DetourMode::kRandom ? "random" : "adversarial";
}

DetourMode parse_detour_mode(const std::string& text) {
  if (text == "random") return DetourMode::kRandom;
  if (text == "adversarial") return DetourMode::kAdversarial;
  throw InputError("unknown detour mode '" + text + "' (random, adversarial)");
}

namespace {

void check_config(const DetourConfig& c) {
  if (!(c.probability >= 0.0 && c.probability <= 1.0)) {
    throw InputError("detour probability must lie in [0, 1]");
  }
  if (c.trials < 1) throw InputError("detour trials must be >= 1");
}

// Token to substitute for `greedy` among `candidates`, or nullopt.
std::optional<TokenId> pick_detour(DetourMode mode, const genmodel::NextDist& dist,
                                   TokenId greedy, const std::vector<TokenId>& candidates,
                                   Rng& rng) {
  std::vector<TokenId> options;
  for (TokenId a : candidates) {
    if (a != greedy) options.push_back(a);
  }
  if (options.empty()) return std::nullopt;
  if (mode == DetourMode::kRandom) return options[uniform_index(rng, options.size())];
  TokenId worst = options.front();
  for (TokenId a : options) {
    if (dist[a] < dist[worst] || (dist[a] == dist[worst] && a > worst)) worst = a;
  }
  return worst;
}

struct TrialOutcome {
  bool valid = false;
  std::size_t detours = 0;
  std::size_t blocked = 0;
};

DetourReport fold(std::vector<TrialOutcome> outcomes, metrics::MetricReport base) {
  DetourReport r;
  r.validity = std::move(base);
  for (const auto& o : outcomes) {
    r.validity.scores.push_back(o.valid ? 1.0 : 0.0);
    r.detours += o.detours;
    r.blocked_detours += o.blocked;
  }
  return r;
}

metrics::MetricReport base_report(const DetourConfig& c, std::uint64_t seed) {
  metrics::MetricReport r;
  r.metric = "detour_validity";
  r.params = {{"p", std::to_string(c.probability)},
              {"mode", to_string(c.mode)},
              {"trials", std::to_string(c.trials)},
              {"max_len", std::to_string(c.max_len)},
              {"seed", std::to_string(seed)}};
  return r;
}

}  // namespace

DetourReport run_detours(const worlds::NavWorld& world, const genmodel::GenerativeModel& model,
                         const std::vector<std::pair<NodeId, NodeId>>& headers,
                         const DetourConfig& config, std::uint64_t seed) {
  check_config(config);
  if (headers.empty()) throw InputError("detour evaluation needs at least one header");
  const auto& nav = *world.nav();
  std::vector<TrialOutcome> outcomes(config.trials);

  parallel_for(config.trials, config.workers, [&](std::size_t t) {
    Rng rng = make_rng(derive_seed(seed, t));
    const auto [origin, dest] = headers[uniform_index(rng, headers.size())];
    TrialOutcome& out = outcomes[t];
    TokenSeq seq{nav.node_token(origin), nav.node_token(dest)};
    StateId q = nav.run(nav.start(), seq);
    if (q == nav.reject()) return;
    std::size_t directions = 0;
    for (;;) {
      const auto dist = model.next_dist(seq);
      if (dist.is_terminal()) return;
      TokenId token = dist.argmax();
      if (bernoulli(rng, config.probability)) {
        std::vector<TokenId> allowed;
        const NodeId target = nav.nav_position(q).second;
        for (TokenId a : automata::valid_tokens(nav, q)) {
          const StateId next = nav.step(q, a);
          if (next == nav.terminal()) {
            allowed.push_back(a);
            continue;
          }
          const NodeId where = nav.nav_position(next).first;
          if (directions + 1 + nav.hops(where, target) < config.max_len) allowed.push_back(a);
        }
        if (auto sub = pick_detour(config.mode, dist, token, allowed, rng)) {
          token = *sub;
          ++out.detours;
        } else {
          ++out.blocked;
        }
      }
      seq.push_back(token);
      q = nav.step(q, token);
      if (q == nav.reject()) return;
      if (q == nav.terminal()) {
        out.valid = directions <= config.max_len;
        return;
      }
      if (++directions > config.max_len) return;
    }
  });
  return fold(std::move(outcomes), base_report(config, seed));
}

DetourReport run_detours_game(const worlds::World& world, const genmodel::GenerativeModel& model,
                              const DetourConfig& config, std::uint64_t seed) {
  check_config(config);
  const auto w = world.automaton();
  std::vector<TrialOutcome> outcomes(config.trials);
  parallel_for(config.trials, config.workers, [&](std::size_t t) {
    Rng rng = make_rng(derive_seed(seed, t));
    TrialOutcome& out = outcomes[t];
    TokenSeq seq;
    StateId q = w->start();
    for (std::size_t ply = 0;; ++ply) {
      const auto legal = automata::valid_tokens(*w, q);
      if (legal.empty()) {
        out.valid = true;
        return;
      }
      if (ply >= config.max_len) return;
      const auto dist = model.next_dist(seq);
      if (dist.is_terminal()) return;
      TokenId token = dist.argmax();
      if (bernoulli(rng, config.probability)) {
        if (auto sub = pick_detour(config.mode, dist, token, legal, rng)) {
          token = *sub;
          ++out.detours;
        } else {
          ++out.blocked;
        }
      }
      seq.push_back(token);
      q = w->step(q, token);
      if (q == w->reject()) return;
    }
  });
  return fold(std::move(outcomes), base_report(config, seed));
}

TokenSeq decode_route(const genmodel::GenerativeModel& model, const worlds::NavAutomaton& nav,
                      NodeId origin, NodeId dest, Decoding decoding,
                      std::size_t max_directions, Rng& rng) {
  TokenSeq seq{nav.node_token(origin), nav.node_token(dest)};
  for (std::size_t k = 0; k <= max_directions; ++k) {
    const auto dist = model.next_dist(seq);
    if (dist.is_terminal()) break;
    TokenId a;
    if (decoding == Decoding::kGreedy) {
      a = dist.argmax();
    } else {
      a = static_cast<TokenId>(sample_weighted(rng, dist.probabilities()));
    }
    seq.push_back(a);
    if (a == nav.end_token()) break;
  }
  return seq;
}

std::vector<std::pair<NodeId, NodeId>> corpus_headers(const worlds::NavAutomaton& nav,
                                                     const std::vector<TokenSeq>& corpus) {
  std::set<std::pair<NodeId, NodeId>> seen;
  std::vector<std::pair<NodeId, NodeId>> out;
  for (const auto& s : corpus) {
    if (s.size() < 2 || !nav.is_node_token(s[0]) || !nav.is_node_token(s[1])) continue;
    const std::pair<NodeId, NodeId> h{s[0], s[1]};
    if (seen.insert(h).second) out.push_back(h);
  }
  return out;
}

}  // namespace worldgauge::detour
