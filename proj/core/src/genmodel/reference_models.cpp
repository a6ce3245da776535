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

#include "worldgauge/genmodel/reference_models.hpp"

#include <cmath>
#include <sstream>

#include "worldgauge/core/errors.hpp"
#include "worldgauge/core/rng.hpp"

namespace worldgauge::genmodel {

namespace {

using automata::Automaton;

// Weighted (or uniform) distribution over the valid tokens at q.
NextDist exact_at(const Automaton& w, StateId q, const TokenWeighting& weighting) {
  const std::size_t n = w.alphabet().size();
  if (q == w.reject()) return NextDist::terminal(n);
  std::vector<double> p(n, 0.0);
  bool any = false;
  for (TokenId a = 0; a < n; ++a) {
    if (w.step(q, a) == w.reject()) continue;
    const double weight = weighting ? weighting(q, a) : 1.0;
    if (!(weight > 0.0) || !std::isfinite(weight)) {
      throw InternalError("token weighting must be positive and finite on valid tokens");
    }
    p[a] = weight;
    any = true;
  }
  if (!any) return NextDist::terminal(n);
  return NextDist::from_probabilities(std::move(p), /*normalize=*/true);
}

class ExactDfaModel final : public GenerativeModel {
 public:
  ExactDfaModel(std::shared_ptr<const Automaton> w, TokenWeighting weighting)
      : w_(std::move(w)), weighting_(std::move(weighting)) {}

  const Alphabet& alphabet() const override { return w_->alphabet(); }
  std::string name() const override { return weighting_ ? "exact-weighted" : "exact"; }

  NextDist next_dist(TokenSpan prefix) const override {
    return exact_at(*w_, w_->run(w_->start(), prefix), weighting_);
  }

 private:
  std::shared_ptr<const Automaton> w_;
  TokenWeighting weighting_;
};

class UniformModel final : public GenerativeModel {
 public:
  explicit UniformModel(Alphabet alphabet) : alphabet_(std::move(alphabet)) {}

  const Alphabet& alphabet() const override { return alphabet_; }
  std::string name() const override { return "uniform"; }

  NextDist next_dist(TokenSpan prefix) const override {
    automata::check_tokens(alphabet_, prefix);
    return NextDist::uniform(alphabet_.size());
  }

 private:
  Alphabet alphabet_;
};

class RandomLogitModel final : public GenerativeModel {
 public:
  RandomLogitModel(Alphabet alphabet, std::uint64_t seed, double scale)
      : alphabet_(std::move(alphabet)), seed_(seed), scale_(scale) {}

  const Alphabet& alphabet() const override { return alphabet_; }
  std::string name() const override { return "random-logit"; }

  NextDist next_dist(TokenSpan prefix) const override {
    automata::check_tokens(alphabet_, prefix);
    std::uint64_t h = mix64(seed_);
    for (TokenId a : prefix) h = mix64(h ^ (static_cast<std::uint64_t>(a) + 1));
    const std::size_t n = alphabet_.size();
    std::vector<double> logits(n);
    double top = -INFINITY;
    for (TokenId a = 0; a < n; ++a) {
      Rng rng(mix64(h ^ mix64(a + 0x51ed27)));
      logits[a] = scale_ * standard_normal(rng);
      top = std::max(top, logits[a]);
    }
    std::vector<double> p(n);
    for (std::size_t a = 0; a < n; ++a) p[a] = std::exp(logits[a] - top);
    return NextDist::from_probabilities(std::move(p), /*normalize=*/true);
  }

 private:
  Alphabet alphabet_;
  std::uint64_t seed_;
  double scale_;
};

class CorruptedDfaModel final : public GenerativeModel {
 public:
  CorruptedDfaModel(std::shared_ptr<const Automaton> w, double c, std::uint64_t seed,
                    std::vector<TokenId> pool, TokenWeighting weighting)
      : w_(std::move(w)), c_(c), seed_(seed), weighting_(std::move(weighting)) {
    const std::size_t n = w_->alphabet().size();
    in_pool_.assign(n, pool.empty());
    for (TokenId a : pool) {
      if (a >= n) throw InputError("relabel pool token outside alphabet");
      in_pool_[a] = true;
    }
    for (TokenId a = 0; a < n; ++a) {
      if (in_pool_[a]) pool_.push_back(a);
    }
  }

  const Alphabet& alphabet() const override { return w_->alphabet(); }
  std::string name() const override {
    std::ostringstream out;
    out << "corrupted(" << c_ << ")";
    return out.str();
  }

  NextDist next_dist(TokenSpan prefix) const override {
    automata::check_tokens(w_->alphabet(), prefix);
    const NextDist base = exact_at(*w_, hidden_state(prefix), weighting_);
    if (base.is_terminal() || pool_.size() < 2 || c_ == 0.0) return base;
    const std::size_t n = base.size();
    std::vector<double> p(n, 0.0);
    const double spread = c_ / static_cast<double>(pool_.size() - 1);
    for (TokenId t = 0; t < n; ++t) {
      const double mass = base[t];
      if (mass == 0.0) continue;
      if (!in_pool_[t]) {
        p[t] += mass;
        continue;
      }
      p[t] += (1.0 - c_) * mass;
      for (TokenId a : pool_) {
        if (a != t) p[a] += spread * mass;
      }
    }
    return NextDist::from_probabilities(std::move(p), /*normalize=*/true);
  }

 private:
  StateId hidden_state(TokenSpan prefix) const {
    StateId h = w_->start();
    const StateId dead = w_->reject();
    for (std::size_t i = 0; i < prefix.size() && h != dead; ++i) {
      const StateId next = w_->step(h, prefix[i]);
      if (next != dead) {
        h = next;
        continue;
      }
      std::vector<TokenId> candidates;
      for (TokenId a : pool_) {
        if (a != prefix[i] && w_->step(h, a) != dead) candidates.push_back(a);
      }
      if (candidates.empty()) return dead;
      const std::uint64_t key =
          mix64(seed_ ^ mix64(i ^ mix64(h ^ mix64(prefix[i] + 1))));
      h = w_->step(h, candidates[key % candidates.size()]);
    }
    return h;
  }

  std::shared_ptr<const Automaton> w_;
  double c_;
  std::uint64_t seed_;
  TokenWeighting weighting_;
  std::vector<bool> in_pool_;
  std::vector<TokenId> pool_;
};

class ExactDfaJudge final : public SequenceJudge {
 public:
  explicit ExactDfaJudge(std::shared_ptr<const Automaton> w) : w_(std::move(w)) {}

  const Alphabet& alphabet() const override { return w_->alphabet(); }

  bool accepts(TokenSpan prefix, TokenSpan suffix) const override {
    if (suffix.empty()) throw InputError("judge: suffix must be non-empty");
    const StateId q = w_->run(w_->start(), prefix);
    if (q == w_->reject()) {
      automata::check_tokens(w_->alphabet(), suffix);
      return false;
    }
    return automata::accepts_from(*w_, q, suffix);
  }

 private:
  std::shared_ptr<const Automaton> w_;
};

}  // namespace

ModelHandle make_exact_dfa_model(std::shared_ptr<const automata::Automaton> world,
                                 TokenWeighting weighting) {
  if (!world) throw InputError("make_exact_dfa_model: null automaton");
  return std::make_shared<ExactDfaModel>(std::move(world), std::move(weighting));
}

ModelHandle make_uniform_model(const Alphabet& alphabet) {
  return std::make_shared<UniformModel>(alphabet);
}

ModelHandle make_random_logit_model(const Alphabet& alphabet, std::uint64_t seed,
                                    double logit_scale) {
  return std::make_shared<RandomLogitModel>(alphabet, seed, logit_scale);
}

ModelHandle make_corrupted_dfa_model(std::shared_ptr<const automata::Automaton> world,
                                     double corruption_prob, std::uint64_t seed,
                                     std::vector<TokenId> relabel_pool,
                                     TokenWeighting weighting) {
  if (!world) throw InputError("make_corrupted_dfa_model: null automaton");
  if (!(corruption_prob >= 0.0 && corruption_prob <= 1.0)) {
    throw InputError("corruption probability must lie in [0, 1]");
  }
  return std::make_shared<CorruptedDfaModel>(std::move(world), corruption_prob, seed,
                                             std::move(relabel_pool),
                                             std::move(weighting));
}

JudgeHandle make_exact_dfa_judge(std::shared_ptr<const automata::Automaton> world) {
  if (!world) throw InputError("make_exact_dfa_judge: null automaton");
  return std::make_shared<ExactDfaJudge>(std::move(world));
}

}  // namespace worldgauge::genmodel
