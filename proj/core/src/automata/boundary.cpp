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

#include "worldgauge/automata/boundary.hpp"

#include <memory>
#include <unordered_map>

#include "worldgauge/core/errors.hpp"

namespace worldgauge::automata {

bool BoundarySet::insert(TokenSeq s) {
  if (s.empty()) throw InternalError("boundary suffixes must be non-empty");
  auto it = suffixes_.lower_bound(s);
  if (it != suffixes_.end() && *it == s) return false;
  // In a prefix-free set, an extension of s sorts right after s and a
  // prefix of s sorts right before it.
  if (it != suffixes_.end() && is_prefix_of(s, *it)) {
    throw InternalError("boundary insert would break minimality (extension present)");
  }
  if (it != suffixes_.begin() && is_prefix_of(*std::prev(it), s)) {
    throw InternalError("boundary insert would break minimality (prefix present)");
  }
  suffixes_.insert(it, std::move(s));
  return true;
}

namespace {

struct PairKey {
  StateId p1;
  StateId p2;
  std::size_t depth;
  bool operator==(const PairKey&) const = default;
};

struct PairKeyHash {
  std::size_t operator()(const PairKey& k) const noexcept {
    return static_cast<std::size_t>(
        mix64(k.p1 ^ mix64(k.p2 ^ mix64(static_cast<std::uint64_t>(k.depth)))));
  }
};

using Tails = std::vector<TokenSeq>;

class PairSearch {
 public:
  explicit PairSearch(const Automaton& w)
      : w_(w),
        dead_(w.reject()),
        width_(static_cast<TokenId>(w.alphabet().size())) {}

  // Boundary suffixes from the pair (p1, p2), both accepting, of length at
  // most `depth`.
  std::shared_ptr<const Tails> tails(StateId p1, StateId p2, std::size_t depth) {
    static const auto kEmpty = std::make_shared<const Tails>();
    if (p1 == p2 || depth == 0) return kEmpty;
    const PairKey key{p1, p2, depth};
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;

    auto out = std::make_shared<Tails>();
    for (TokenId a = 0; a < width_; ++a) {
      const StateId n1 = w_.step(p1, a);
      if (n1 == dead_) continue;
      const StateId n2 = w_.step(p2, a);
      if (n2 == dead_) {
        out->push_back(TokenSeq{a});
        continue;
      }
      for (const TokenSeq& tail : *tails(n1, n2, depth - 1)) {
        TokenSeq s;
        s.reserve(tail.size() + 1);
        s.push_back(a);
        s.insert(s.end(), tail.begin(), tail.end());
        out->push_back(std::move(s));
      }
    }
    std::shared_ptr<const Tails> result = std::move(out);
    memo_.emplace(key, result);
    return result;
  }

 private:
  const Automaton& w_;
  StateId dead_;
  TokenId width_;
  std::unordered_map<PairKey, std::shared_ptr<const Tails>, PairKeyHash> memo_;
};

}  // namespace

BoundarySet compute_boundary_exact(const Automaton& w, StateId q1, StateId q2,
                                   std::size_t max_depth) {
  if (max_depth == 0) throw InputError("compute_boundary_exact: depth must be >= 1");
  if (!w.is_state(q1) || !w.is_state(q2)) {
    throw InputError("compute_boundary_exact: unknown state");
  }
  if (q1 == w.reject() || q2 == w.reject()) {
    throw InputError("compute_boundary_exact: states must be accepting");
  }
  BoundarySet out(BoundaryMode::kExactToDepth, max_depth);
  PairSearch search(w);
  for (const TokenSeq& s : *search.tails(q1, q2, max_depth)) out.insert(s);
  return out;
}

BoundarySet compute_boundary_sampled(const Automaton& w, StateId q1,
                                     StateId q2,
                                     const ContinuationSampler& sampler,
                                     std::size_t samples, std::uint64_t seed) {
  if (q1 == w.reject() || q2 == w.reject()) {
    throw InputError("compute_boundary_sampled: states must be accepting");
  }
  BoundarySet out(BoundaryMode::kSampled, samples);
  if (q1 == q2) return out;
  for (std::size_t i = 0; i < samples; ++i) {
    Rng rng = make_rng(derive_seed(seed, i));
    const TokenSeq x = sampler(q1, rng);
    if (x.empty()) continue;
    if (w.run(q1, x) == w.reject()) {
      throw InternalError("continuation sampler produced a sequence rejected from q1");
    }
    StateId p = q2;
    for (std::size_t j = 0; j < x.size(); ++j) {
      p = w.step(p, x[j]);
      if (p == w.reject()) {
        out.insert(TokenSeq(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(j) + 1));
        break;
      }
    }
  }
  return out;
}

ContinuationSampler random_walk_sampler(const Automaton& w,
                                        std::size_t max_len) {
  return [&w, max_len](StateId from, Rng& rng) {
    TokenSeq out;
    StateId q = from;
    while (out.size() < max_len) {
      const auto options = valid_tokens(w, q);
      if (options.empty()) break;
      const TokenId a = options[uniform_index(rng, options.size())];
      out.push_back(a);
      q = w.step(q, a);
    }
    return out;
  };
}

}  // namespace worldgauge::automata
