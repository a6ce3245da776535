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
#include <vector>

#include "worldgauge/automata/alphabet.hpp"
#include "worldgauge/genmodel/acceptance.hpp"
#include "worldgauge/genmodel/next_dist.hpp"

namespace worldgauge::genmodel {

using automata::Alphabet;

// A next-token generative model m: Sigma* -> Delta(Sigma).
//
// next_dist must be a pure function of the prefix. Implementations shipped
// with the library are immutable and safe for concurrent use; bridge-backed
// models serialize access to their session internally.
class GenerativeModel {
 public:
  virtual ~GenerativeModel() = default;

  virtual const Alphabet& alphabet() const = 0;
  virtual std::string name() const = 0;

  // Throws InputError for prefixes with unknown tokens, TransportError for
  // bridge failures.
  virtual NextDist next_dist(TokenSpan prefix) const = 0;

  virtual std::vector<NextDist> next_dist_batch(
      std::span<const TokenSeq> prefixes) const;
};

using ModelHandle = std::shared_ptr<const GenerativeModel>;

// Accept/reject oracle over (prefix, suffix) pairs. This is the only
// capability some external models (prompted LLMs) expose.
class SequenceJudge {
 public:
  virtual ~SequenceJudge() = default;
  virtual const Alphabet& alphabet() const = 0;
  virtual bool accepts(TokenSpan prefix, TokenSpan suffix) const = 0;
};

using JudgeHandle = std::shared_ptr<const SequenceJudge>;

// True iff every token of the non-empty suffix is accepted by the rule under
// the model conditioned on prefix plus the preceding suffix tokens.
bool accepts_suffix(const GenerativeModel& model, TokenSpan prefix,
                    TokenSpan suffix, const AcceptanceRule& rule);

// Judge view of a model under an acceptance rule.
class RuleJudge final : public SequenceJudge {
 public:
  RuleJudge(ModelHandle model, AcceptanceRule rule)
      : model_(std::move(model)), rule_(rule) {}

  const Alphabet& alphabet() const override { return model_->alphabet(); }
  bool accepts(TokenSpan prefix, TokenSpan suffix) const override {
    return accepts_suffix(*model_, prefix, suffix, rule_);
  }

 private:
  ModelHandle model_;
  AcceptanceRule rule_;
};

struct SampledSuffix {
  TokenSeq tokens;
  // Sampling stopped because no token passed the rule. The model language
  // from this point is treated as empty.
  bool truncated = false;
};

struct SuffixSampling {
  std::size_t count = 30;
  std::size_t max_len = 100;
  std::optional<TokenId> end_token;
  std::uint64_t seed = 0;
};

// Draws `count` suffixes from the model conditioned on prefix, renormalized
// over rule-accepted tokens at every step. A suffix stops after emitting the
// end token, at max_len tokens, or (truncated) when nothing is accepted.
// Sample i uses derive_seed(seed, i) and consumes exactly one uniform draw
// per emitted token, so shortening max_len yields prefixes of the longer
// samples.
std::vector<SampledSuffix> sample_suffixes(const GenerativeModel& model,
                                           TokenSpan prefix,
                                           const AcceptanceRule& rule,
                                           const SuffixSampling& params);

}  // namespace worldgauge::genmodel
