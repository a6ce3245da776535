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

#include "worldgauge/worlds/connect4.hpp"

#include <mutex>

#include "worldgauge/core/errors.hpp"

namespace worldgauge::worlds {

namespace {

Alphabet connect4_alphabet() {
  std::vector<std::string> names;
  for (std::size_t c = 1; c <= kConnectColumns; ++c) names.push_back(std::to_string(c));
  return Alphabet(std::move(names));
}

}  // namespace

std::size_t Connect4Automaton::KeyHash::operator()(const ColumnCounts& c) const noexcept {
  std::uint64_t h = 0;
  for (auto v : c) h = mix64(h ^ v);
  return static_cast<std::size_t>(h);
}

Connect4Automaton::Connect4Automaton(std::size_t rows)
    : rows_(rows), alphabet_(connect4_alphabet()) {
  if (rows < 1 || rows > 0xffff) throw InputError("Connect-4 rows must be in 1..65535");
  intern(ColumnCounts{});
}

bool Connect4Automaton::is_state(StateId q) const {
  std::shared_lock lock(mutex_);
  return q <= states_.size();
}

ColumnCounts Connect4Automaton::counts(StateId q) const {
  if (q == reject()) throw InputError("the reject state has no column counts");
  std::shared_lock lock(mutex_);
  if (q > states_.size()) throw InputError("unknown Connect-4 state");
  return states_[q - 1];
}

StateId Connect4Automaton::intern(const ColumnCounts& counts) const {
  for (auto v : counts) {
    if (v > rows_) throw InputError("column count exceeds the number of rows");
  }
  {
    std::shared_lock lock(mutex_);
    if (auto it = ids_.find(counts); it != ids_.end()) return it->second;
  }
  std::unique_lock lock(mutex_);
  if (auto it = ids_.find(counts); it != ids_.end()) return it->second;
  states_.push_back(counts);
  const StateId id = states_.size();
  ids_.emplace(counts, id);
  return id;
}

std::size_t Connect4Automaton::interned_states() const {
  std::shared_lock lock(mutex_);
  return states_.size();
}

StateId Connect4Automaton::do_step(StateId q, TokenId a) const {
  if (q == reject()) return reject();
  ColumnCounts c = counts(q);
  if (c[a] >= rows_) return reject();
  ++c[a];
  return intern(c);
}

StateId Connect4Automaton::do_run(StateId q, TokenSpan s) const {
  if (q == reject()) return reject();
  if (s.empty()) return q;
  ColumnCounts c = counts(q);
  for (TokenId a : s) {
    if (c[a] >= rows_) return reject();
    ++c[a];
  }
  return intern(c);
}

std::string Connect4Automaton::describe_state(StateId q) const {
  if (q == reject()) return "reject";
  const ColumnCounts c = counts(q);
  std::string out = "(";
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(c[i]);
  }
  return out + ")";
}

Connect4World::Connect4World(std::size_t rows)
    : c4_(std::make_shared<Connect4Automaton>(rows)) {}

StateId Connect4World::sample_state(Rng& rng) const {
  ColumnCounts c{};
  for (auto& v : c) v = static_cast<std::uint16_t>(uniform_index(rng, c4_->rows() + 1));
  return c4_->intern(c);
}

TokenSeq Connect4World::sample_prefix(StateId q, Rng& rng) const {
  if (q == c4_->reject()) throw DomainError("the reject state has no prefix");
  const ColumnCounts c = c4_->counts(q);
  TokenSeq drops;
  for (TokenId col = 0; col < kConnectColumns; ++col) drops.insert(drops.end(), c[col], col);
  shuffle(drops.begin(), drops.end(), rng);
  return drops;
}

}  // namespace worldgauge::worlds
