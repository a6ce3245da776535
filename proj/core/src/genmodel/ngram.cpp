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

#include "worldgauge/genmodel/ngram.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "worldgauge/core/errors.hpp"

namespace worldgauge::genmodel {

namespace {
constexpr const char* kNGramFormat = "wg-ngram-v1";
}

NGramModel::NGramModel(Alphabet alphabet, std::size_t order, double lambda,
                       std::vector<Table> tables)
    : alphabet_(std::move(alphabet)),
      order_(order),
      lambda_(lambda),
      tables_(std::move(tables)) {
  if (order_ < 1) throw InputError("n-gram order must be >= 1");
  if (!(lambda_ > 0.0) || !std::isfinite(lambda_)) {
    throw InputError("n-gram smoothing lambda must be positive");
  }
  tables_.resize(order_);
  for (std::size_t len = 0; len < tables_.size(); ++len) {
    for (const auto& [ctx, row] : tables_[len]) {
      if (ctx.size() != len) throw InputError("n-gram table context has wrong length");
      automata::check_tokens(alphabet_, ctx);
      std::uint64_t sum = 0;
      for (const auto& [a, c] : row.counts) {
        if (!alphabet_.contains(a)) throw InputError("n-gram count for unknown token");
        sum += c;
      }
      if (sum != row.total) throw InputError("n-gram row total does not match counts");
    }
  }
}

std::string NGramModel::name() const {
  return "ngram(order=" + std::to_string(order_) + ")";
}

NextDist NGramModel::next_dist(TokenSpan prefix) const {
  automata::check_tokens(alphabet_, prefix);
  const std::size_t n = alphabet_.size();
  std::size_t len = std::min(order_ - 1, prefix.size());
  for (;; --len) {
    const TokenSeq ctx(prefix.end() - static_cast<std::ptrdiff_t>(len), prefix.end());
    auto it = tables_[len].find(ctx);
    if (it != tables_[len].end() && it->second.total > 0) {
      const Row& row = it->second;
      const double denom = static_cast<double>(row.total) + lambda_ * static_cast<double>(n);
      std::vector<double> p(n, lambda_ / denom);
      for (const auto& [a, c] : row.counts) {
        p[a] = (static_cast<double>(c) + lambda_) / denom;
      }
      return NextDist::from_probabilities(std::move(p), /*normalize=*/true);
    }
    if (len == 0) break;
  }
  return NextDist::uniform(n);
}

std::shared_ptr<const NGramModel> train_ngram(const Alphabet& alphabet,
                                              const std::vector<TokenSeq>& corpus,
                                              std::size_t order, double lambda) {
  if (order < 1) throw InputError("n-gram order must be >= 1");
  if (!(lambda > 0.0)) throw InputError("n-gram smoothing lambda must be positive");
  std::vector<NGramModel::Table> tables(order);
  for (const TokenSeq& s : corpus) {
    automata::check_tokens(alphabet, s);
    for (std::size_t i = 0; i < s.size(); ++i) {
      for (std::size_t len = 0; len < order && len <= i; ++len) {
        TokenSeq ctx(s.begin() + static_cast<std::ptrdiff_t>(i - len),
                     s.begin() + static_cast<std::ptrdiff_t>(i));
        auto& row = tables[len][std::move(ctx)];
        ++row.total;
        ++row.counts[s[i]];
      }
    }
  }
  return std::make_shared<NGramModel>(alphabet, order, lambda, std::move(tables));
}

std::string ngram_to_json(const NGramModel& model) {
  nlohmann::json doc;
  doc["format"] = kNGramFormat;
  doc["order"] = model.order();
  doc["lambda"] = model.lambda();
  doc["alphabet"] = model.alphabet().names();
  nlohmann::json tables = nlohmann::json::array();
  for (const auto& table : model.tables()) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& [ctx, row] : table) {
      nlohmann::json counts = nlohmann::json::array();
      for (const auto& [a, c] : row.counts) counts.push_back({a, c});
      rows.push_back({{"context", ctx}, {"total", row.total}, {"counts", counts}});
    }
    tables.push_back(std::move(rows));
  }
  doc["tables"] = std::move(tables);
  return doc.dump() + "\n";
}

std::shared_ptr<const NGramModel> ngram_from_json(const std::string& text) {
  try {
    const auto doc = nlohmann::json::parse(text);
    if (doc.at("format") != kNGramFormat) {
      throw InputError("unsupported n-gram format tag " + doc.at("format").dump());
    }
    std::vector<NGramModel::Table> tables;
    for (const auto& rows : doc.at("tables")) {
      NGramModel::Table table;
      for (const auto& r : rows) {
        NGramModel::Row row;
        row.total = r.at("total").get<std::uint64_t>();
        for (const auto& pair : r.at("counts")) {
          row.counts[pair.at(0).get<TokenId>()] = pair.at(1).get<std::uint64_t>();
        }
        table.emplace(r.at("context").get<TokenSeq>(), std::move(row));
      }
      tables.push_back(std::move(table));
    }
    return std::make_shared<NGramModel>(
        Alphabet(doc.at("alphabet").get<std::vector<std::string>>()),
        doc.at("order").get<std::size_t>(), doc.at("lambda").get<double>(),
        std::move(tables));
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed n-gram document: ") + e.what());
  }
}

void save_ngram(const NGramModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << ngram_to_json(model);
  if (!out) throw IoError("write to '" + path + "' failed");
}

std::shared_ptr<const NGramModel> load_ngram(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return ngram_from_json(buf.str());
}

double perplexity(const GenerativeModel& model, const std::vector<TokenSeq>& corpus) {
  double log_sum = 0.0;
  std::size_t count = 0;
  for (const TokenSeq& s : corpus) {
    for (std::size_t i = 0; i < s.size(); ++i) {
      const NextDist d = model.next_dist(TokenSpan(s.data(), i));
      log_sum += std::log(d[s[i]]);
      ++count;
    }
  }
  if (count == 0) return 1.0;
  return std::exp(-log_sum / static_cast<double>(count));
}

}  // namespace worldgauge::genmodel
