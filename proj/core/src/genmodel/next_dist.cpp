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

#include "worldgauge/genmodel/next_dist.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "worldgauge/core/errors.hpp"

namespace worldgauge::genmodel {

namespace {
constexpr double kSumTolerance = 1e-9;
}

NextDist NextDist::from_probabilities(std::vector<double> p, bool normalize) {
  if (p.empty()) throw InputError("NextDist: empty probability vector");
  double total = 0.0;
  for (double v : p) {
    if (!std::isfinite(v) || v < 0.0) {
      throw InputError("NextDist: probabilities must be finite and non-negative");
    }
    total += v;
  }
  NextDist d;
  if (total == 0.0) {
    d.p_ = std::move(p);
    d.terminal_ = true;
    return d;
  }
  if (normalize) {
    for (double& v : p) v /= total;
  } else if (std::abs(total - 1.0) > kSumTolerance) {
    throw InputError("NextDist: probabilities sum to " + std::to_string(total));
  }
  d.p_ = std::move(p);
  return d;
}

NextDist NextDist::uniform(std::size_t size) {
  if (size == 0) throw InputError("NextDist: empty alphabet");
  NextDist d;
  d.p_.assign(size, 1.0 / static_cast<double>(size));
  return d;
}

NextDist NextDist::terminal(std::size_t size) {
  if (size == 0) throw InputError("NextDist: empty alphabet");
  NextDist d;
  d.p_.assign(size, 0.0);
  d.terminal_ = true;
  return d;
}

std::vector<TokenId> NextDist::argmax_set() const {
  std::vector<TokenId> out;
  if (terminal_) return out;
  const double best = *std::max_element(p_.begin(), p_.end());
  for (TokenId a = 0; a < p_.size(); ++a) {
    if (p_[a] == best) out.push_back(a);
  }
  return out;
}

TokenId NextDist::argmax() const {
  if (terminal_) throw InputError("argmax of the terminal distribution");
  return static_cast<TokenId>(std::max_element(p_.begin(), p_.end()) - p_.begin());
}

std::vector<TokenId> NextDist::ranking() const {
  std::vector<TokenId> order(p_.size());
  std::iota(order.begin(), order.end(), TokenId{0});
  std::stable_sort(order.begin(), order.end(),
                   [this](TokenId a, TokenId b) { return p_[a] > p_[b]; });
  return order;
}

}  // namespace worldgauge::genmodel
