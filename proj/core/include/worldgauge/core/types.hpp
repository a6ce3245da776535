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
#include <span>
#include <vector>

namespace worldgauge {

using TokenId = std::uint32_t;
using StateId = std::uint64_t;

// A token sequence. Rendering to text needs the owning Alphabet, see
// automata/alphabet.hpp.
using TokenSeq = std::vector<TokenId>;
using TokenSpan = std::span<const TokenId>;

inline TokenSeq concat(TokenSpan a, TokenSpan b) {
  TokenSeq out;
  out.reserve(a.size() + b.size());
  out.insert(out.end(), a.begin(), a.end());
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

inline bool is_prefix_of(TokenSpan prefix, TokenSpan seq) {
  if (prefix.size() > seq.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    if (prefix[i] != seq[i]) return false;
  }
  return true;
}

}  // namespace worldgauge
