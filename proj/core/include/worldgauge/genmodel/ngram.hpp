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

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "worldgauge/genmodel/model.hpp"

namespace worldgauge::genmodel {

// Additive-smoothing n-gram with back-off to shorter contexts.
//
// For context length L = min(order - 1, |prefix|), the model uses the most
// recent L tokens if that context was observed in training, otherwise backs
// off to L - 1, down to the unigram table:
//
//   p(a | ctx) = (count(ctx, a) + lambda) / (count(ctx) + lambda * |Sigma|)
//
// An empty training corpus yields the uniform distribution.
class NGramModel final : public GenerativeModel {
 public:
  struct Row {
    std::uint64_t total = 0;
    std::map<TokenId, std::uint64_t> counts;
  };
  // tables[L] maps length-L contexts to continuation counts.
  using Table = std::map<TokenSeq, Row>;

  NGramModel(Alphabet alphabet, std::size_t order, double lambda,
             std::vector<Table> tables);

  const Alphabet& alphabet() const override { return alphabet_; }
  std::string name() const override;
  NextDist next_dist(TokenSpan prefix) const override;

  std::size_t order() const noexcept { return order_; }
  double lambda() const noexcept { return lambda_; }
  const std::vector<Table>& tables() const noexcept { return tables_; }

 private:
  Alphabet alphabet_;
  std::size_t order_;
  double lambda_;
  std::vector<Table> tables_;
};

// Count-based training. Throws InputError for order < 1 or lambda <= 0.
std::shared_ptr<const NGramModel> train_ngram(const Alphabet& alphabet,
                                              const std::vector<TokenSeq>& corpus,
                                              std::size_t order, double lambda);

// Count-table serialization (format tag "wg-ngram-v1", see docs/formats.md).
std::string ngram_to_json(const NGramModel& model);
std::shared_ptr<const NGramModel> ngram_from_json(const std::string& text);
void save_ngram(const NGramModel& model, const std::string& path);
std::shared_ptr<const NGramModel> load_ngram(const std::string& path);

// exp(-mean log p) over every token position of the corpus.
double perplexity(const GenerativeModel& model, const std::vector<TokenSeq>& corpus);

}  // namespace worldgauge::genmodel
