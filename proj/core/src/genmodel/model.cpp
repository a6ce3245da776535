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

#include "worldgauge/genmodel/model.hpp"

#include "worldgauge/core/errors.hpp"
#include "worldgauge/core/rng.hpp"

namespace worldgauge::genmodel {

std::vector<NextDist> GenerativeModel::next_dist_batch(
    std::span<const TokenSeq> prefixes) const {
  std::vector<NextDist> out;
  out.reserve(prefixes.size());
  for (const TokenSeq& p : prefixes) out.push_back(next_dist(p));
  return out;
}

bool accepts_suffix(const GenerativeModel& model, TokenSpan prefix,
                    TokenSpan suffix, const AcceptanceRule& rule) {
  if (suffix.empty()) throw InputError("accepts_suffix: suffix must be non-empty");
  automata::check_tokens(model.alphabet(), suffix);
  TokenSeq context(prefix.begin(), prefix.end());
  context.reserve(prefix.size() + suffix.size());
  for (TokenId a : suffix) {
    if (!rule.accepts(model.next_dist(context), a)) return false;
    context.push_back(a);
  }
  return true;
}

std::vector<SampledSuffix> sample_suffixes(const GenerativeModel& model,
                                           TokenSpan prefix,
                                           const AcceptanceRule& rule,
                                           const SuffixSampling& params) {
  if (params.max_len < 1) throw InputError("sample_suffixes: max_len must be >= 1");
  std::vector<SampledSuffix> out;
  out.reserve(params.count);
  for (std::size_t i = 0; i < params.count; ++i) {
    Rng rng = make_rng(derive_seed(params.seed, i));
    SampledSuffix sample;
    TokenSeq context(prefix.begin(), prefix.end());
    while (sample.tokens.size() < params.max_len) {
      const NextDist dist = model.next_dist(context);
      const std::vector<bool> ok = rule.accepted(dist);
      std::vector<double> weights(dist.size(), 0.0);
      for (TokenId a = 0; a < dist.size(); ++a) {
        if (ok[a]) weights[a] = dist[a];
      }
      const std::size_t pick = sample_weighted(rng, weights);
      if (pick == weights.size()) {
        sample.truncated = true;
        break;
      }
      const auto a = static_cast<TokenId>(pick);
      sample.tokens.push_back(a);
      context.push_back(a);
      if (params.end_token && a == *params.end_token) break;
    }
    out.push_back(std::move(sample));
  }
  return out;
}

}  // namespace worldgauge::genmodel
