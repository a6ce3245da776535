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

#include "worldgauge/automata/dfa.hpp"

#include <fstream>
#include <sstream>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "worldgauge/core/errors.hpp"

namespace worldgauge::automata {

namespace {
constexpr const char* kDfaFormat = "wg-dfa-v1";
}

Dfa::Dfa(Alphabet alphabet, std::size_t num_states, StateId start,
         StateId reject, std::vector<StateId> transitions)
    : alphabet_(std::move(alphabet)),
      num_states_(num_states),
      start_(start),
      reject_(reject),
      table_(std::move(transitions)) {
  const std::size_t width = alphabet_.size();
  if (width == 0) throw InputError("Dfa: empty alphabet");
  if (num_states_ == 0) throw InputError("Dfa: need at least one state");
  if (start_ >= num_states_) throw InputError("Dfa: start state out of range");
  if (reject_ >= num_states_) throw InputError("Dfa: reject state out of range");
  if (table_.size() != num_states_ * width) {
    throw InputError("Dfa: transition table has " + std::to_string(table_.size()) +
                     " entries, expected " + std::to_string(num_states_ * width));
  }
  for (StateId t : table_) {
    if (t >= num_states_) throw InputError("Dfa: transition target out of range");
  }
  for (std::size_t a = 0; a < width; ++a) {
    if (table_[reject_ * width + a] != reject_) {
      throw InputError("Dfa: reject state must only loop to itself");
    }
  }
}

Materialized materialize(const Automaton& w, std::size_t max_states) {
  std::vector<StateId> order = reachable_states(w, max_states);
  std::unordered_map<StateId, StateId> dense;
  dense.reserve(order.size() + 1);
  for (StateId i = 0; i < order.size(); ++i) dense.emplace(order[i], i);
  const StateId reject = order.size();
  const std::size_t width = w.alphabet().size();
  std::vector<StateId> table;
  table.reserve((order.size() + 1) * width);
  for (StateId q : order) {
    for (TokenId a = 0; a < width; ++a) {
      const StateId next = w.step(q, a);
      table.push_back(next == w.reject() ? reject : dense.at(next));
    }
  }
  for (std::size_t a = 0; a < width; ++a) table.push_back(reject);
  order.push_back(w.reject());
  const StateId start = w.start() == w.reject() ? reject : 0;
  return {Dfa(w.alphabet(), reject + 1, start, reject, std::move(table)),
          std::move(order)};
}

std::string dfa_to_json(const Dfa& dfa) {
  nlohmann::json doc;
  doc["format"] = kDfaFormat;
  doc["alphabet"] = dfa.alphabet().names();
  doc["num_states"] = dfa.num_states();
  doc["start"] = dfa.start();
  doc["reject"] = dfa.reject();
  doc["transitions"] = std::vector<StateId>(dfa.transitions().begin(),
                                            dfa.transitions().end());
  return doc.dump(2) + "\n";
}

Dfa dfa_from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("DFA document is not valid JSON: ") + e.what());
  }
  try {
    if (doc.contains("format") && doc.at("format") != kDfaFormat) {
      throw InputError("unsupported DFA format tag " + doc.at("format").dump());
    }
    return Dfa(Alphabet(doc.at("alphabet").get<std::vector<std::string>>()),
               doc.at("num_states").get<std::size_t>(),
               doc.at("start").get<StateId>(), doc.at("reject").get<StateId>(),
               doc.at("transitions").get<std::vector<StateId>>());
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed DFA document: ") + e.what());
  }
}

void save_dfa(const Dfa& dfa, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << dfa_to_json(dfa);
  if (!out) throw IoError("write to '" + path + "' failed");
}

Dfa load_dfa(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return dfa_from_json(buf.str());
}

}  // namespace worldgauge::automata
