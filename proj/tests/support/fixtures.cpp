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

#include "fixtures.hpp"

#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "worldgauge/core/errors.hpp"
#include "worldgauge/core/rng.hpp"

namespace worldgauge::fixtures {

automata::Dfa table_dfa(std::size_t alphabet_size, std::size_t num_states, StateId start,
                        StateId reject, std::vector<StateId> table) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < alphabet_size; ++i) names.push_back(std::string(1, char('a' + i)));
  return automata::Dfa(automata::Alphabet(names), num_states, start, reject, std::move(table));
}

DfaWorld::DfaWorld(std::shared_ptr<const automata::Dfa> dfa, std::size_t min_len,
                   std::size_t max_len, std::size_t suffix_cap)
    : dfa_(std::move(dfa)), suffix_cap_(suffix_cap) {
  const std::size_t k = dfa_->alphabet().size();
  std::vector<TokenSeq> layer{{}};
  for (std::size_t len = 0; len <= max_len; ++len) {
    if (len >= min_len) {
      for (const auto& s : layer) {
        const StateId q = dfa_->run(dfa_->start(), s);
        if (q != dfa_->reject()) prefixes_[q].push_back(s);
      }
    }
    std::vector<TokenSeq> next;
    for (const auto& s : layer) {
      for (TokenId a = 0; a < k; ++a) {
        TokenSeq t = s;
        t.push_back(a);
        next.push_back(std::move(t));
      }
    }
    layer = std::move(next);
  }
  for (const auto& [q, list] : prefixes_) states_.push_back(q);
  if (states_.empty()) throw std::runtime_error("DfaWorld: no reachable states");
}

StateId DfaWorld::sample_state(Rng& rng) const {
  return states_[uniform_index(rng, states_.size())];
}

TokenSeq DfaWorld::sample_prefix(StateId q, Rng& rng) const {
  const auto it = prefixes_.find(q);
  if (it == prefixes_.end()) throw DomainError("DfaWorld: state has no prefix");
  return it->second[uniform_index(rng, it->second.size())];
}

TempDir::TempDir() {
  std::random_device rd;
  const auto base = std::filesystem::temp_directory_path();
  for (int attempt = 0; attempt < 100; ++attempt) {
    auto candidate = base / ("worldgauge-test-" + std::to_string(rd()));
    if (std::filesystem::create_directory(candidate)) {
      path_ = candidate;
      return;
    }
  }
  throw std::runtime_error("could not create a temporary directory");
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + path);
}

}  // namespace worldgauge::fixtures
