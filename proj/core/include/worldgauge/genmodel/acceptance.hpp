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

#include <string>
#include <vector>

#include "worldgauge/genmodel/next_dist.hpp"

namespace worldgauge::genmodel {

// Policy turning a next-token distribution into a set of accepted tokens,
// which in turn induces the model language L^m.
//
//   epsilon: p(a) > eps                                 eps in (0, 1)
//   top_k:   a among the k highest-ranked tokens        k >= 1
//   top_p:   a in the smallest highest-probability set  p in (0, 1]
//            whose cumulative mass is strictly larger than p
//
// Ranking breaks ties by ascending token id. Tokens with zero probability
// are never accepted by any rule.
class AcceptanceRule {
 public:
  enum class Kind { kEpsilon, kTopK, kTopP };

  static AcceptanceRule epsilon(double eps);
  static AcceptanceRule top_k(std::size_t k);
  static AcceptanceRule top_p(double p);

  // Parses "epsilon=0.01", "top_k=3" or "top_p=0.9".
  static AcceptanceRule parse(const std::string& text);

  Kind kind() const noexcept { return kind_; }
  double parameter() const noexcept { return parameter_; }
  std::string to_string() const;

  // accepted[a] for every token.
  std::vector<bool> accepted(const NextDist& dist) const;
  bool accepts(const NextDist& dist, TokenId a) const;

  friend bool operator==(const AcceptanceRule&, const AcceptanceRule&) = default;

 private:
  AcceptanceRule(Kind kind, double parameter) : kind_(kind), parameter_(parameter) {}

  Kind kind_;
  double parameter_;
};

// accepts_token(rule, dist, a) from the operation list.
inline bool accepts_token(const AcceptanceRule& rule, const NextDist& dist,
                          TokenId a) {
  return rule.accepts(dist, a);
}

}  // namespace worldgauge::genmodel
