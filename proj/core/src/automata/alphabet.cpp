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

#include "worldgauge/automata/alphabet.hpp"

#include <cctype>

#include "worldgauge/core/errors.hpp"

namespace worldgauge::automata {

Alphabet::Alphabet(std::vector<std::string> names) : names_(std::move(names)) {
  if (names_.empty()) throw InputError("alphabet must contain at least one token");
  index_.reserve(names_.size());
  for (TokenId i = 0; i < names_.size(); ++i) {
    const std::string& n = names_[i];
    if (n.empty()) throw InputError("alphabet token names must be non-empty");
    for (char c : n) {
      if (std::isspace(static_cast<unsigned char>(c))) {
        throw InputError("alphabet token '" + n + "' contains whitespace");
      }
    }
    if (!index_.emplace(n, i).second) {
      throw InputError("duplicate alphabet token '" + n + "'");
    }
  }
}

const std::string& Alphabet::name(TokenId id) const {
  if (!contains(id)) {
    throw InputError("token id " + std::to_string(id) + " outside alphabet of size " +
                     std::to_string(size()));
  }
  return names_[id];
}

std::optional<TokenId> Alphabet::find(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

TokenId Alphabet::id(std::string_view name) const {
  if (auto id = find(name)) return *id;
  throw InputError("unknown token '" + std::string(name) + "'");
}

std::string render(const Alphabet& alphabet, TokenSpan seq) {
  std::string out;
  for (std::size_t i = 0; i < seq.size(); ++i) {
    if (i) out += ' ';
    out += alphabet.name(seq[i]);
  }
  return out;
}

TokenSeq parse_tokens(const Alphabet& alphabet, std::string_view text) {
  TokenSeq out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t j = i;
    while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j]))) ++j;
    if (j > i) out.push_back(alphabet.id(text.substr(i, j - i)));
    i = j;
  }
  return out;
}

void check_tokens(const Alphabet& alphabet, TokenSpan seq) {
  for (TokenId a : seq) {
    if (!alphabet.contains(a)) {
      throw InputError("token id " + std::to_string(a) + " outside alphabet of size " +
                       std::to_string(alphabet.size()));
    }
  }
}

}  // namespace worldgauge::automata
