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

#include <span>
#include <vector>

#include "worldgauge/core/types.hpp"

namespace worldgauge::genmodel {

// Next-token distribution m(. | s) over a whole alphabet.
//
// Entries are non-negative and sum to 1 within 1e-9, except for the
// terminal distribution (all zeros) which models "no continuation": the
// exact model at a dead-end state or after an invalid prefix.
class NextDist {
 public:
  NextDist() = default;

  // Throws InputError on negative or non-finite entries, or a sum that is
  // neither ~1 nor 0. With normalize=true any positive total is rescaled.
  static NextDist from_probabilities(std::vector<double> p, bool normalize = false);
  static NextDist uniform(std::size_t size);
  static NextDist terminal(std::size_t size);

  std::size_t size() const noexcept { return p_.size(); }
  double operator[](TokenId a) const { return p_.at(a); }
  std::span<const double> probabilities() const& noexcept { return p_; }
  std::span<const double> probabilities() const&& = delete;  // would dangle
  bool is_terminal() const noexcept { return terminal_; }

  // Tokens attaining the maximum probability, in id order. Empty for the
  // terminal distribution.
  std::vector<TokenId> argmax_set() const;
  // Lowest-id token of argmax_set(). Requires !is_terminal().
  TokenId argmax() const;

  // Token ids sorted by descending probability, ties by ascending id.
  std::vector<TokenId> ranking() const;

 private:
  std::vector<double> p_;
  bool terminal_ = false;
};

}  // namespace worldgauge::genmodel
