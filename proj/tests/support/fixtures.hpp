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

// Small hand-built worlds, models and judges shared by the unit tests.
#pragma once

#include <atomic>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "worldgauge/automata/dfa.hpp"
#include "worldgauge/genmodel/model.hpp"
#include "worldgauge/worlds/world.hpp"

namespace worldgauge::fixtures {

// Dfa over single-letter token names "a", "b", ... from a row-major table.
automata::Dfa table_dfa(std::size_t alphabet_size, std::size_t num_states, StateId start,
                        StateId reject, std::vector<StateId> table);

// Model whose distribution is any function of the prefix.
class FunctionModel final : public genmodel::GenerativeModel {
 public:
  using Fn = std::function<genmodel::NextDist(TokenSpan)>;
  FunctionModel(automata::Alphabet alphabet, Fn fn, std::string name = "function")
      : alphabet_(std::move(alphabet)), fn_(std::move(fn)), name_(std::move(name)) {}
  const automata::Alphabet& alphabet() const override { return alphabet_; }
  std::string name() const override { return name_; }
  genmodel::NextDist next_dist(TokenSpan prefix) const override { return fn_(prefix); }

 private:
  automata::Alphabet alphabet_;
  Fn fn_;
  std::string name_;
};

// Judge whose answer flips on every call, so two consecutive questions
// about the same continuation always disagree.
class ContradictoryJudge final : public genmodel::SequenceJudge {
 public:
  explicit ContradictoryJudge(automata::Alphabet alphabet) : alphabet_(std::move(alphabet)) {}
  const automata::Alphabet& alphabet() const override { return alphabet_; }
  bool accepts(TokenSpan, TokenSpan) const override { return (calls_++ % 2) == 0; }

 private:
  automata::Alphabet alphabet_;
  mutable std::atomic<std::uint64_t> calls_{0};
};

// World over an explicit Dfa. Prefixes are drawn uniformly from every
// sequence of length min_len..max_len that reaches the requested state, and
// states uniformly from those that have at least one such prefix.
class DfaWorld final : public worlds::World {
 public:
  DfaWorld(std::shared_ptr<const automata::Dfa> dfa, std::size_t min_len, std::size_t max_len,
           std::size_t suffix_cap = 8);
  std::string name() const override { return "dfa"; }
  std::shared_ptr<const automata::Automaton> automaton() const override { return dfa_; }
  std::size_t suffix_max_len() const override { return suffix_cap_; }
  StateId sample_state(Rng& rng) const override;
  TokenSeq sample_prefix(StateId q, Rng& rng) const override;
  const std::vector<TokenSeq>& prefixes_of(StateId q) const { return prefixes_.at(q); }

 private:
  std::shared_ptr<const automata::Dfa> dfa_;
  std::size_t suffix_cap_;
  std::vector<StateId> states_;
  std::map<StateId, std::vector<TokenSeq>> prefixes_;
};

// Fresh empty directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const noexcept { return path_; }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& text);

}  // namespace worldgauge::fixtures
