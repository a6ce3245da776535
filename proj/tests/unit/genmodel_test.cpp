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

#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "worldgauge/core/errors.hpp"
#include "worldgauge/genmodel/acceptance.hpp"
#include "worldgauge/genmodel/ngram.hpp"
#include "worldgauge/genmodel/reference_models.hpp"
#include "worldgauge/worlds/connect4.hpp"
#include "worldgauge/worlds/nav_world.hpp"

namespace worldgauge::genmodel {
namespace {

using automata::Alphabet;

NextDist dist(std::vector<double> p) { return NextDist::from_probabilities(std::move(p)); }

std::shared_ptr<const worlds::Connect4Automaton> connect4(std::size_t n) {
  return std::make_shared<worlds::Connect4Automaton>(n);
}

TEST(NextDist, ValidatesEntries) {
  EXPECT_THROW(dist({0.5, -0.1, 0.6}), InputError);
  EXPECT_THROW(dist({0.5, 0.6}), InputError);
  EXPECT_THROW(dist({NAN, 1.0}), InputError);
  EXPECT_NO_THROW(NextDist::from_probabilities({2.0, 2.0}, true));
  EXPECT_DOUBLE_EQ(NextDist::from_probabilities({2.0, 6.0}, true)[1], 0.75);
  EXPECT_TRUE(NextDist::terminal(3).is_terminal());
}

TEST(NextDist, RankingAndArgmaxBreakTiesById) {
  const auto d = dist({0.3, 0.1, 0.3, 0.3});
  EXPECT_EQ(d.ranking(), (std::vector<TokenId>{0, 2, 3, 1}));
  EXPECT_EQ(d.argmax_set(), (std::vector<TokenId>{0, 2, 3}));
  EXPECT_EQ(d.argmax(), 0u);
  EXPECT_TRUE(NextDist::terminal(3).argmax_set().empty());
}

TEST(AcceptanceRule, EpsilonIsStrict) {
  const auto rule = AcceptanceRule::epsilon(0.01);
  const auto d = dist({0.02, 0.01, 0.97});
  EXPECT_TRUE(accepts_token(rule, d, 0));
  EXPECT_FALSE(accepts_token(rule, d, 1));
  EXPECT_TRUE(accepts_token(rule, d, 2));
}

TEST(AcceptanceRule, TopKUsesRank) {
  const auto d = dist({0.2, 0.5, 0.3});
  EXPECT_TRUE(accepts_token(AcceptanceRule::top_k(1), d, 1));
  EXPECT_FALSE(accepts_token(AcceptanceRule::top_k(1), d, 2));
  EXPECT_TRUE(accepts_token(AcceptanceRule::top_k(2), d, 2));
  EXPECT_FALSE(accepts_token(AcceptanceRule::top_k(2), d, 0));
}

TEST(AcceptanceRule, TopPLiteralMinimalSet) {
  const auto d = dist({0.6, 0.3, 0.1});
  // 0.6 + 0.3 is not strictly larger than 0.9, so the set grows to all three.
  EXPECT_EQ(AcceptanceRule::top_p(0.9).accepted(d), (std::vector<bool>{true, true, true}));
  EXPECT_EQ(AcceptanceRule::top_p(0.85).accepted(d), (std::vector<bool>{true, true, false}));
  EXPECT_EQ(AcceptanceRule::top_p(0.5).accepted(d), (std::vector<bool>{true, false, false}));
}

TEST(AcceptanceRule, TopPNeverAcceptsZeroMass) {
  EXPECT_EQ(AcceptanceRule::top_p(1.0).accepted(dist({0.5, 0.0, 0.5})),
            (std::vector<bool>{true, false, true}));
}

TEST(AcceptanceRule, TerminalDistributionAcceptsNothing) {
  for (const auto& rule : {AcceptanceRule::epsilon(0.01), AcceptanceRule::top_k(3),
                           AcceptanceRule::top_p(0.9)}) {
    EXPECT_EQ(rule.accepted(NextDist::terminal(3)), std::vector<bool>(3, false));
  }
}

TEST(AcceptanceRule, ParameterRangesAndParsing) {
  EXPECT_THROW(AcceptanceRule::epsilon(0.0), InputError);
  EXPECT_THROW(AcceptanceRule::epsilon(1.0), InputError);
  EXPECT_THROW(AcceptanceRule::top_k(0), InputError);
  EXPECT_THROW(AcceptanceRule::top_p(0.0), InputError);
  EXPECT_THROW(AcceptanceRule::top_p(1.5), InputError);
  EXPECT_EQ(AcceptanceRule::parse("epsilon=0.01"), AcceptanceRule::epsilon(0.01));
  EXPECT_EQ(AcceptanceRule::parse("top_k=3"), AcceptanceRule::top_k(3));
  EXPECT_EQ(AcceptanceRule::parse("top_p=0.9"), AcceptanceRule::top_p(0.9));
  EXPECT_THROW(AcceptanceRule::parse("top_q=1"), InputError);
  EXPECT_THROW(AcceptanceRule::parse("epsilon"), InputError);
  EXPECT_THROW(AcceptanceRule::parse("epsilon=abc"), InputError);
  const auto r = AcceptanceRule::top_p(0.25);
  EXPECT_EQ(AcceptanceRule::parse(r.to_string()), r);
}

TEST(AcceptanceRule, MonotoneInParameter) {
  Rng rng = make_rng(3);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> p(6);
    for (auto& x : p) x = uniform01(rng) < 0.2 ? 0.0 : uniform01(rng);
    p[0] += 0.01;
    const auto d = NextDist::from_probabilities(p, true);
    auto subset = [](const std::vector<bool>& small, const std::vector<bool>& big) {
      for (std::size_t i = 0; i < small.size(); ++i) {
        if (small[i] && !big[i]) return false;
      }
      return true;
    };
    const double e1 = 0.001 + 0.3 * uniform01(rng);
    const double e2 = e1 + 0.3 * uniform01(rng);
    EXPECT_TRUE(subset(AcceptanceRule::epsilon(e2).accepted(d),
                       AcceptanceRule::epsilon(e1).accepted(d)));
    const std::size_t k = 1 + uniform_index(rng, 5);
    EXPECT_TRUE(subset(AcceptanceRule::top_k(k).accepted(d),
                       AcceptanceRule::top_k(k + 1).accepted(d)));
    const double p1 = 0.01 + 0.5 * uniform01(rng);
    const double p2 = std::min(1.0, p1 + 0.4 * uniform01(rng));
    EXPECT_TRUE(subset(AcceptanceRule::top_p(p1).accepted(d),
                       AcceptanceRule::top_p(p2).accepted(d)));
  }
}

TEST(UniformModel, SeventhEverywhereOnConnect4) {
  const auto c4 = connect4(4);
  const auto m = make_uniform_model(c4->alphabet());
  for (const TokenSeq& prefix : {TokenSeq{}, TokenSeq{0, 0, 0, 0}, TokenSeq{3, 1, 6}}) {
    const auto d = m->next_dist(prefix);
    for (TokenId a = 0; a < 7; ++a) EXPECT_DOUBLE_EQ(d[a], 1.0 / 7.0);
  }
  EXPECT_THROW(m->next_dist(TokenSeq{9}), InputError);
}

TEST(UniformModel, AcceptanceDependsOnlyOnEpsilon) {
  const auto c4 = connect4(2);
  const auto m = make_uniform_model(c4->alphabet());
  for (const auto& x : oracle::all_sequences(7, 2)) {
    EXPECT_TRUE(accepts_suffix(*m, TokenSeq{0, 0}, x, AcceptanceRule::epsilon(0.01)));
    EXPECT_FALSE(accepts_suffix(*m, TokenSeq{}, x, AcceptanceRule::epsilon(0.2)));
  }
}

TEST(ExactModel, UniformOverValidTokens) {
  const auto c4 = connect4(1);
  const auto m = make_exact_dfa_model(c4);
  // Columns 1, 2, 4 and 5 full: three open columns remain.
  const auto d = m->next_dist(TokenSeq{0, 1, 3, 4});
  for (TokenId a = 0; a < 7; ++a) {
    const bool open = a == 2 || a == 5 || a == 6;
    EXPECT_DOUBLE_EQ(d[a], open ? 1.0 / 3.0 : 0.0) << a;
  }
}

TEST(ExactModel, EndHasMassAtDestination) {
  worlds::GridCityParams params;
  params.rows = 3;
  params.cols = 3;
  const auto g = std::make_shared<const worlds::StreetGraph>(worlds::gen_grid_city(params, 2));
  const auto nav = std::make_shared<worlds::NavAutomaton>(g);
  const auto m = make_exact_dfa_model(nav);
  EXPECT_GT(m->next_dist(TokenSeq{4, 4})[nav->end_token()], 0.0);
  EXPECT_EQ(m->next_dist(TokenSeq{4, 5})[nav->end_token()], 0.0);
}

TEST(ExactModel, ExactNextTokenPredictionOnRandomPrefixes) {
  const auto c4 = connect4(3);
  const auto m = make_exact_dfa_model(c4);
  Rng rng = make_rng(17);
  for (int i = 0; i < 1000; ++i) {
    TokenSeq prefix;
    StateId q = c4->start();
    const std::size_t len = uniform_index(rng, 22);
    while (prefix.size() < len) {
      const auto valid = automata::valid_tokens(*c4, q);
      if (valid.empty()) break;
      const TokenId a = valid[uniform_index(rng, valid.size())];
      prefix.push_back(a);
      q = c4->step(q, a);
    }
    const auto d = m->next_dist(prefix);
    for (TokenId a = 0; a < 7; ++a) {
      EXPECT_EQ(d[a] > 0.0, c4->step(q, a) != c4->reject());
    }
  }
}

TEST(ExactModel, LanguageEquivalenceOnRandomDfas) {
  Rng rng = make_rng(23);
  for (int trial = 0; trial < 10; ++trial) {
    const auto d = std::make_shared<automata::Dfa>(oracle::random_dfa(rng, 5, 3, 0.25));
    const auto m = make_exact_dfa_model(d);
    const auto rule = AcceptanceRule::epsilon(0.01);
    for (const auto& prefix : oracle::all_sequences(3, 2)) {
      const StateId q = d->run(d->start(), prefix);
      if (q == d->reject()) continue;
      for (const auto& x : oracle::all_sequences(3, 3)) {
        EXPECT_EQ(accepts_suffix(*m, prefix, x, rule), oracle::accepted_from(*d, q, x));
      }
    }
  }
}

TEST(AcceptsSuffix, EmptySuffixIsAnInputError) {
  const auto m = make_uniform_model(Alphabet({"a", "b"}));
  EXPECT_THROW(accepts_suffix(*m, TokenSeq{}, TokenSeq{}, AcceptanceRule::epsilon(0.1)),
               InputError);
}

TEST(SampleSuffixes, ExactSamplesAreValidAndDeterministic) {
  const auto c4 = connect4(2);
  const auto m = make_exact_dfa_model(c4);
  SuffixSampling params;
  params.count = 30;
  params.max_len = 14;
  params.seed = 99;
  const TokenSeq prefix = {0, 3};
  const auto a = sample_suffixes(*m, prefix, AcceptanceRule::epsilon(0.01), params);
  const auto b = sample_suffixes(*m, prefix, AcceptanceRule::epsilon(0.01), params);
  ASSERT_EQ(a.size(), 30u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].tokens, b[i].tokens);
    EXPECT_EQ(a[i].tokens.size(), 12u);  // fills the remaining board
    EXPECT_TRUE(automata::accepts_from(*c4, c4->run(c4->start(), prefix), a[i].tokens));
    EXPECT_TRUE(a[i].truncated);  // full board: nothing passes after the last drop
  }
}

TEST(SampleSuffixes, FrequenciesMatchRenormalizedProbabilities) {
  const Alphabet ab({"a", "b", "c", "d"});
  fixtures::FunctionModel m(ab, [](TokenSpan) { return dist({0.5, 0.3, 0.195, 0.005}); });
  SuffixSampling params;
  params.count = 10000;
  params.max_len = 1;
  params.seed = 5;
  const auto samples = sample_suffixes(m, TokenSeq{}, AcceptanceRule::epsilon(0.01), params);
  std::vector<double> freq(4, 0.0);
  for (const auto& s : samples) {
    ASSERT_EQ(s.tokens.size(), 1u);
    freq[s.tokens[0]] += 1.0;
  }
  const std::vector<double> expected = {0.5 / 0.995, 0.3 / 0.995, 0.195 / 0.995, 0.0};
  for (TokenId a = 0; a < 4; ++a) {
    const double p = expected[a];
    const double sigma = std::sqrt(p * (1 - p) / 10000.0);
    EXPECT_NEAR(freq[a] / 10000.0, p, 3 * sigma + 1e-12) << a;
  }
  EXPECT_EQ(freq[3], 0.0);
}

TEST(SampleSuffixes, StopsAtEndTokenAndFlagsTruncation) {
  const Alphabet ab({"a", "end"});
  fixtures::FunctionModel m(ab, [](TokenSpan p) {
    return p.size() < 2 ? dist({1.0, 0.0}) : dist({0.0, 1.0});
  });
  SuffixSampling params;
  params.count = 3;
  params.max_len = 10;
  params.end_token = 1;
  auto out = sample_suffixes(m, TokenSeq{}, AcceptanceRule::epsilon(0.01), params);
  EXPECT_EQ(out[0].tokens, (TokenSeq{0, 0, 1}));
  EXPECT_FALSE(out[0].truncated);

  fixtures::FunctionModel flat(ab, [](TokenSpan) { return dist({0.5, 0.5}); });
  out = sample_suffixes(flat, TokenSeq{}, AcceptanceRule::epsilon(0.6), params);
  EXPECT_TRUE(out[0].tokens.empty());
  EXPECT_TRUE(out[0].truncated);
  params.max_len = 0;
  EXPECT_THROW(sample_suffixes(flat, TokenSeq{}, AcceptanceRule::epsilon(0.1), params),
               InputError);
}

TEST(SampleSuffixes, NeverEmitsARejectedToken) {
  const auto m = make_random_logit_model(Alphabet({"a", "b", "c", "d", "e"}), 8, 2.0);
  const auto rule = AcceptanceRule::top_k(2);
  SuffixSampling params;
  params.count = 50;
  params.max_len = 8;
  for (const auto& s : sample_suffixes(*m, TokenSeq{}, rule, params)) {
    EXPECT_TRUE(accepts_suffix(*m, TokenSeq{}, s.tokens, rule));
  }
}

TEST(RandomLogitModel, DeterministicPerSeedAndPrefix) {
  const Alphabet ab({"a", "b", "c"});
  const auto m1 = make_random_logit_model(ab, 3);
  const auto m2 = make_random_logit_model(ab, 3);
  const auto m3 = make_random_logit_model(ab, 4);
  const TokenSeq p = {0, 2};
  const auto d1 = m1->next_dist(p);
  const auto d2 = m2->next_dist(p);
  for (TokenId a = 0; a < 3; ++a) EXPECT_EQ(d1[a], d2[a]);
  bool differs = false;
  for (TokenId a = 0; a < 3; ++a) differs = differs || d1[a] != m3->next_dist(p)[a];
  EXPECT_TRUE(differs);
}

TEST(CorruptedModel, ZeroCorruptionEqualsExact) {
  const auto c4 = connect4(2);
  const auto exact = make_exact_dfa_model(c4);
  const auto corrupted = make_corrupted_dfa_model(c4, 0.0, 1);
  for (const TokenSeq& p : {TokenSeq{}, TokenSeq{0, 0}, TokenSeq{1, 2, 1, 2}}) {
    for (TokenId a = 0; a < 7; ++a) {
      EXPECT_EQ(exact->next_dist(p)[a], corrupted->next_dist(p)[a]);
    }
  }
}

TEST(CorruptedModel, FullCorruptionMovesAllOwnMass) {
  const auto c4 = connect4(1);
  const auto m = make_corrupted_dfa_model(c4, 1.0, 1);
  // Only column 7 is open; all of its mass is relabelled elsewhere.
  const auto d = m->next_dist(TokenSeq{0, 1, 2, 3, 4, 5});
  EXPECT_EQ(d[6], 0.0);
  for (TokenId a = 0; a < 6; ++a) EXPECT_DOUBLE_EQ(d[a], 1.0 / 6.0);
}

TEST(CorruptedModel, InvalidMassMatchesRelabelSimulation) {
  const auto c4 = connect4(1);
  const double c = 0.3;
  const auto m = make_corrupted_dfa_model(c4, c, 1);
  const TokenSeq prefix = {0, 1, 2};  // four open columns, three full
  const StateId q = c4->run(c4->start(), prefix);
  const auto d = m->next_dist(prefix);
  double invalid_mass = 0.0;
  for (TokenId a = 0; a < 7; ++a) {
    if (c4->step(q, a) == c4->reject()) invalid_mass += d[a];
  }
  Rng rng = make_rng(77);
  const auto valid = automata::valid_tokens(*c4, q);
  const int draws = 200000;
  int invalid = 0;
  for (int i = 0; i < draws; ++i) {
    TokenId t = valid[uniform_index(rng, valid.size())];
    if (bernoulli(rng, c)) {
      TokenId other = static_cast<TokenId>(uniform_index(rng, 6));
      if (other >= t) ++other;
      t = other;
    }
    if (c4->step(q, t) == c4->reject()) ++invalid;
  }
  const double rate = static_cast<double>(invalid) / draws;
  EXPECT_NEAR(invalid_mass, c * 3.0 / 6.0, 1e-12);
  EXPECT_NEAR(rate, invalid_mass, 4 * std::sqrt(invalid_mass * (1 - invalid_mass) / draws));
}

TEST(CorruptedModel, RejectsBadParameters) {
  const auto c4 = connect4(1);
  EXPECT_THROW(make_corrupted_dfa_model(c4, -0.1, 1), InputError);
  EXPECT_THROW(make_corrupted_dfa_model(c4, 1.1, 1), InputError);
  EXPECT_THROW(make_corrupted_dfa_model(c4, 0.1, 1, {42}), InputError);
}

TEST(NGram, HandCountsOrderOne) {
  const Alphabet ab({"a", "b", "c"});
  // Three lines: unigram counts a=3, b=2, c=1.
  const std::vector<TokenSeq> corpus = {{0, 1}, {0, 0}, {1, 2}};
  const auto m = train_ngram(ab, corpus, 1, 1.0);
  const auto d = m->next_dist(TokenSeq{2, 2});
  EXPECT_DOUBLE_EQ(d[0], 4.0 / 9.0);
  EXPECT_DOUBLE_EQ(d[1], 3.0 / 9.0);
  EXPECT_DOUBLE_EQ(d[2], 2.0 / 9.0);
}

TEST(NGram, BacksOffToShorterContexts) {
  const Alphabet ab({"a", "b", "c"});
  const auto m = train_ngram(ab, {{0, 1}, {0, 1}, {0, 2}}, 2, 0.5);
  // Seen context "a": counts b=2, c=1.
  auto d = m->next_dist(TokenSeq{0});
  EXPECT_DOUBLE_EQ(d[1], 2.5 / 4.5);
  EXPECT_DOUBLE_EQ(d[0], 0.5 / 4.5);
  // Context "c" never seen with a continuation: unigram row (a=3, b=2, c=1).
  d = m->next_dist(TokenSeq{2});
  EXPECT_DOUBLE_EQ(d[0], 3.5 / 7.5);
}

TEST(NGram, SingleSequenceIsReproducedGreedily) {
  const Alphabet ab({"a", "b", "c", "d"});
  const TokenSeq seq = {0, 2, 1, 3, 3, 2};
  const auto m = train_ngram(ab, {seq}, 3, 0.1);
  TokenSeq out;
  for (std::size_t i = 1; i < seq.size(); ++i) {
    TokenSeq prefix(seq.begin(), seq.begin() + static_cast<std::ptrdiff_t>(i));
    out.push_back(m->next_dist(prefix).argmax());
  }
  EXPECT_EQ(out, TokenSeq(seq.begin() + 1, seq.end()));
}

TEST(NGram, EmptyCorpusAndHeavySmoothingApproachUniform) {
  const Alphabet ab({"a", "b", "c"});
  const auto empty = train_ngram(ab, {}, 2, 1.0);
  for (TokenId a = 0; a < 3; ++a) EXPECT_DOUBLE_EQ(empty->next_dist(TokenSeq{})[a], 1.0 / 3);
  const auto heavy = train_ngram(ab, {{0, 0, 0, 0}}, 1, 1e9);
  for (TokenId a = 0; a < 3; ++a) EXPECT_NEAR(heavy->next_dist(TokenSeq{})[a], 1.0 / 3, 1e-8);
}

TEST(NGram, DistributionsSumToOne) {
  const auto c4 = connect4(2);
  Rng rng = make_rng(1);
  std::vector<TokenSeq> corpus;
  for (int i = 0; i < 50; ++i) {
    TokenSeq s;
    for (int j = 0; j < 8; ++j) s.push_back(static_cast<TokenId>(uniform_index(rng, 7)));
    corpus.push_back(s);
  }
  const auto m = train_ngram(c4->alphabet(), corpus, 3, 0.01);
  for (const auto& s : corpus) {
    const auto d = m->next_dist(TokenSpan(s).first(4));
    double total = 0.0;
    for (double p : d.probabilities()) total += p;
    EXPECT_NEAR(total, 1.0, 1e-12);
  }
}

TEST(NGram, JsonRoundTripAndValidation) {
  const Alphabet ab({"a", "b"});
  const auto m = train_ngram(ab, {{0, 1, 1}, {1, 0}}, 2, 0.25);
  const std::string text = ngram_to_json(*m);
  const auto back = ngram_from_json(text);
  EXPECT_EQ(ngram_to_json(*back), text);
  EXPECT_EQ(back->order(), 2u);
  EXPECT_DOUBLE_EQ(back->lambda(), 0.25);
  EXPECT_THROW(ngram_from_json("{\"format\":\"other\"}"), InputError);
  EXPECT_THROW(train_ngram(ab, {}, 0, 1.0), InputError);
  EXPECT_THROW(train_ngram(ab, {}, 1, 0.0), InputError);
  EXPECT_THROW(train_ngram(ab, {{5}}, 1, 1.0), InputError);
}

TEST(NGram, PerplexityFiniteAndUniformBaseline) {
  const Alphabet ab({"a", "b", "c", "d"});
  const std::vector<TokenSeq> corpus = {{0, 1, 2}, {3, 3}};
  EXPECT_NEAR(perplexity(*make_uniform_model(ab), corpus), 4.0, 1e-12);
  const auto m = train_ngram(ab, {{0, 1}}, 2, 0.5);
  EXPECT_TRUE(std::isfinite(perplexity(*m, corpus)));
}

TEST(RuleJudge, MatchesAcceptsSuffix) {
  const auto c4 = connect4(1);
  const auto m = make_exact_dfa_model(c4);
  const RuleJudge judge(m, AcceptanceRule::epsilon(0.01));
  const auto exact = make_exact_dfa_judge(c4);
  for (const auto& x : oracle::all_sequences(7, 2)) {
    EXPECT_EQ(judge.accepts(TokenSeq{0}, x), exact->accepts(TokenSeq{0}, x));
  }
}

TEST(Batch, DefaultBatchMatchesSingleQueries) {
  const auto c4 = connect4(2);
  const auto m = make_exact_dfa_model(c4);
  const std::vector<TokenSeq> prefixes = {{}, {0}, {0, 0}, {1, 1, 1}};
  const auto batch = m->next_dist_batch(prefixes);
  ASSERT_EQ(batch.size(), prefixes.size());
  for (std::size_t i = 0; i < prefixes.size(); ++i) {
    for (TokenId a = 0; a < 7; ++a) EXPECT_EQ(batch[i][a], m->next_dist(prefixes[i])[a]);
  }
}

}  // namespace
}  // namespace worldgauge::genmodel
