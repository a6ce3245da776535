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

#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "worldgauge/core/types.hpp"

namespace worldgauge::automata {

// Ordered set of token names with dense ids 0..size()-1. Names are
// non-empty, unique and free of whitespace so that a space-separated
// rendering of a sequence is unambiguous.
class Alphabet {
 public:
  Alphabet() = default;
  explicit Alphabet(std::vector<std::string> names);

  std::size_t size() const noexcept { return names_.size(); }
  bool contains(TokenId id) const noexcept { return id < names_.size(); }

  const std::string& name(TokenId id) const;
  const std::vector<std::string>& names() const noexcept { return names_; }

  std::optional<TokenId> find(std::string_view name) const;
  // Throws InputError for unknown names.
  TokenId id(std::string_view name) const;

  friend bool operator==(const Alphabet& a, const Alphabet& b) {
    return a.names_ == b.names_;
  }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, TokenId> index_;
};

// Canonical text form: token names joined by single spaces.
std::string render(const Alphabet& alphabet, TokenSpan seq);

// Inverse of render; accepts any run of whitespace as separator.
TokenSeq parse_tokens(const Alphabet& alphabet, std::string_view text);

// Throws InputError unless every id is in the alphabet.
void check_tokens(const Alphabet& alphabet, TokenSpan seq);

}  // namespace worldgauge::automata
