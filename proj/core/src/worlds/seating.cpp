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

#include "worldgauge/worlds/seating.hpp"

#include <algorithm>
#include <bit>
#include <mutex>
#include <numeric>

#include "worldgauge/core/errors.hpp"

namespace worldgauge::worlds {

namespace {

std::string person_name(std::size_t p) { return std::string(1, static_cast<char>('A' + p)); }

bool mask_empty(const SeatingAutomaton::Mask& m) {
  return std::all_of(m.begin(), m.end(), [](std::uint64_t w) { return w == 0; });
}

}  // namespace

SeatingAutomaton::SeatingAutomaton(std::size_t n) : n_(n), alphabet_({"_"}) {
  if (n < 2 || n > 7) throw InputError("seating puzzles support 2..7 people");
  Arrangement perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  do {
    perms_.push_back(perm);
  } while (std::next_permutation(perm.begin(), perm.end()));

  std::vector<std::string> names;
  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t s = 0; s < n; ++s) {
      statements_.push_back({SeatingStatement::Kind::kSeat, p, s, 0});
      names.push_back("seat(" + person_name(p) + "," + std::to_string(s + 1) + ")");
    }
  }
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      for (std::size_t d = 1; d < n; ++d) {
        statements_.push_back({SeatingStatement::Kind::kDistance, a, b, d});
        names.push_back("dist(" + person_name(a) + "," + person_name(b) + "," +
                        std::to_string(d) + ")");
      }
    }
  }
  alphabet_ = Alphabet(std::move(names));

  const std::size_t words = (perms_.size() + 63) / 64;
  for (const auto& st : statements_) {
    Mask m(words, 0);
    for (std::size_t i = 0; i < perms_.size(); ++i) {
      if (holds(st, perms_[i])) m[i / 64] |= 1ULL << (i % 64);
    }
    truth_.push_back(std::move(m));
  }
  Mask full(words, 0);
  for (std::size_t i = 0; i < perms_.size(); ++i) full[i / 64] |= 1ULL << (i % 64);
  intern(full);
}

bool SeatingAutomaton::holds(const SeatingStatement& s, const Arrangement& perm) const {
  if (s.kind == SeatingStatement::Kind::kSeat) return perm[s.a] == s.b;
  const int gap = static_cast<int>(perm[s.a]) - static_cast<int>(perm[s.b]);
  return static_cast<std::size_t>(gap < 0 ? -gap : gap) == s.d;
}

TokenId SeatingAutomaton::seat_token(std::size_t person, std::size_t seat) const {
  if (person >= n_ || seat >= n_) throw InputError("seat token out of range");
  return static_cast<TokenId>(person * n_ + seat);
}

bool SeatingAutomaton::is_state(StateId q) const {
  std::shared_lock lock(mutex_);
  return q <= states_.size();
}

SeatingAutomaton::Mask SeatingAutomaton::mask(StateId q) const {
  if (q == reject()) return Mask(truth_.front().size(), 0);
  std::shared_lock lock(mutex_);
  if (q > states_.size()) throw InputError("unknown seating state");
  return states_[q - 1];
}

StateId SeatingAutomaton::intern(const Mask& m) const {
  if (mask_empty(m)) return reject();
  {
    std::shared_lock lock(mutex_);
    if (auto it = ids_.find(m); it != ids_.end()) return it->second;
  }
  std::unique_lock lock(mutex_);
  if (auto it = ids_.find(m); it != ids_.end()) return it->second;
  states_.push_back(m);
  const StateId id = states_.size();
  ids_.emplace(m, id);
  return id;
}

std::size_t SeatingAutomaton::interned_states() const {
  std::shared_lock lock(mutex_);
  return states_.size();
}

std::size_t SeatingAutomaton::consistent_count(StateId q) const {
  std::size_t count = 0;
  for (auto w : mask(q)) count += static_cast<std::size_t>(std::popcount(w));
  return count;
}

std::vector<TokenId> SeatingAutomaton::implied_statements(StateId q) const {
  const Mask m = mask(q);
  std::vector<TokenId> out;
  for (TokenId t = 0; t < truth_.size(); ++t) {
    bool implied = true;
    for (std::size_t i = 0; i < m.size() && implied; ++i) implied = (m[i] & ~truth_[t][i]) == 0;
    if (implied) out.push_back(t);
  }
  return out;
}

StateId SeatingAutomaton::do_step(StateId q, TokenId a) const {
  if (q == reject()) return reject();
  Mask m = mask(q);
  for (std::size_t i = 0; i < m.size(); ++i) m[i] &= truth_[a][i];
  return intern(m);
}

StateId SeatingAutomaton::do_run(StateId q, TokenSpan s) const {
  if (q == reject()) return reject();
  if (s.empty()) return q;
  Mask m = mask(q);
  for (TokenId a : s) {
    for (std::size_t i = 0; i < m.size(); ++i) m[i] &= truth_[a][i];
  }
  return intern(m);
}

std::string SeatingAutomaton::describe_state(StateId q) const {
  if (q == reject()) return "reject";
  const Mask m = mask(q);
  std::string out = "{";
  bool first = true;
  for (std::size_t i = 0; i < perms_.size(); ++i) {
    if (!(m[i / 64] >> (i % 64) & 1)) continue;
    if (!first) out += ' ';
    first = false;
    std::string row(n_, '?');
    for (std::size_t p = 0; p < n_; ++p) row[perms_[i][p]] = static_cast<char>('A' + p);
    out += row;
  }
  return out + "}";
}

SeatingWorld::SeatingWorld(std::size_t n)
    : seating_(std::make_shared<SeatingAutomaton>(n)) {}

std::size_t SeatingWorld::suffix_max_len() const { return seating_->alphabet().size(); }

StateId SeatingWorld::sample_state(Rng& rng) const {
  StateId q = seating_->start();
  const std::size_t k = 1 + uniform_index(rng, 2);
  for (std::size_t i = 0; i < k; ++i) {
    const auto valid = automata::valid_tokens(*seating_, q);
    q = seating_->step(q, valid[uniform_index(rng, valid.size())]);
  }
  return q;
}

TokenSeq SeatingWorld::sample_prefix(StateId q, Rng& rng) const {
  if (q == seating_->reject()) throw DomainError("the reject state has no prefix");
  const auto implied = seating_->implied_statements(q);
  TokenSeq out;
  StateId cur = seating_->start();
  while (cur != q) {
    std::vector<std::pair<TokenId, StateId>> narrowing;
    for (TokenId t : implied) {
      const StateId next = seating_->step(cur, t);
      if (next != cur) narrowing.emplace_back(t, next);
    }
    if (narrowing.empty()) throw InternalError("seating prefix sampler stalled");
    const auto& pick = narrowing[uniform_index(rng, narrowing.size())];
    out.push_back(pick.first);
    cur = pick.second;
  }
  return out;
}

SeatingTask fully_specified_task(const SeatingAutomaton& w, std::uint64_t seed,
                                 bool minimal) {
  Rng rng = make_rng(seed);
  SeatingTask task;
  task.answer = w.arrangements()[uniform_index(rng, w.arrangements().size())];
  StateId cur = w.start();
  while (w.consistent_count(cur) > 1) {
    std::vector<std::pair<TokenId, StateId>> narrowing;
    for (TokenId t = 0; t < w.alphabet().size(); ++t) {
      if (!w.holds(w.statement(t), task.answer)) continue;
      const StateId next = w.step(cur, t);
      if (next != cur) narrowing.emplace_back(t, next);
    }
    const auto& pick = narrowing[uniform_index(rng, narrowing.size())];
    task.statements.push_back(pick.first);
    cur = pick.second;
  }
  if (minimal) {
    std::vector<std::size_t> order(task.statements.size());
    std::iota(order.begin(), order.end(), 0);
    shuffle(order.begin(), order.end(), rng);
    std::vector<bool> keep(task.statements.size(), true);
    for (std::size_t i : order) {
      keep[i] = false;
      TokenSeq rest;
      for (std::size_t j = 0; j < keep.size(); ++j) {
        if (keep[j]) rest.push_back(task.statements[j]);
      }
      if (w.consistent_count(w.run(w.start(), rest)) != 1) keep[i] = true;
    }
    TokenSeq kept;
    for (std::size_t j = 0; j < keep.size(); ++j) {
      if (keep[j]) kept.push_back(task.statements[j]);
    }
    task.statements = std::move(kept);
  }
  return task;
}

metrics::MetricReport seating_task_accuracy(const SeatingWorld& world,
                                            const genmodel::SequenceJudge& judge,
                                            std::size_t instances, std::uint64_t seed,
                                            bool minimal) {
  const auto& w = *world.seating();
  metrics::MetricReport report;
  report.metric = "task_accuracy";
  report.params = {{"instances", std::to_string(instances)},
                   {"minimal", minimal ? "true" : "false"},
                   {"seed", std::to_string(seed)}};
  for (std::size_t i = 0; i < instances; ++i) {
    const SeatingTask task = fully_specified_task(w, derive_seed(seed, i), minimal);
    bool solved = true;
    for (std::size_t p = 0; p < w.people() && solved; ++p) {
      for (std::size_t s = 0; s < w.people() && solved; ++s) {
        const TokenSeq answer{w.seat_token(p, s)};
        solved = judge.accepts(task.statements, answer) == (task.answer[p] == s);
      }
    }
    report.scores.push_back(solved ? 1.0 : 0.0);
  }
  return report;
}

}  // namespace worldgauge::worlds
