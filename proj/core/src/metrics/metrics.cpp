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

#include "worldgauge/metrics/metrics.hpp"

#include <array>
#include <atomic>
#include <mutex>
#include <numeric>

#include <spdlog/spdlog.h>

#include "worldgauge/core/parallel.hpp"
#include "worldgauge/core/rng.hpp"

namespace worldgauge::metrics {

namespace {

enum class SlotStatus { kNotRun, kScore, kNotApplicable, kSkipped };

struct SlotValue {
  SlotStatus status = SlotStatus::kNotRun;
  double score = 0.0;
};

template <std::size_t K>
struct Slot {
  std::array<SlotValue, K> values{};
  std::size_t resampled = 0;
};

// Runs `count` independent slots and folds them, in slot order, into K
// reports. A transport failure stops new slots from starting and surfaces
// as EvaluationAborted with the first report's completed slots.
template <std::size_t K, typename Fn>
std::array<MetricReport, K> run_slots(std::size_t count, std::size_t workers,
                                      std::array<MetricReport, K> reports, Fn&& fn) {
  std::vector<Slot<K>> slots(count);
  std::atomic<bool> aborted{false};
  std::mutex error_mutex;
  std::string error_message;

  parallel_for(count, workers, [&](std::size_t i) {
    if (aborted.load()) return;
    try {
      slots[i] = fn(i);
    } catch (const TransportError& e) {
      std::lock_guard lock(error_mutex);
      if (!aborted.exchange(true)) error_message = e.what();
      slots[i] = Slot<K>{};
    }
  });

  for (const auto& slot : slots) {
    for (std::size_t k = 0; k < K; ++k) {
      const SlotValue& v = slot.values[k];
      switch (v.status) {
        case SlotStatus::kScore: reports[k].scores.push_back(v.score); break;
        case SlotStatus::kNotApplicable: ++reports[k].not_applicable; break;
        case SlotStatus::kSkipped: ++reports[k].skipped; break;
        case SlotStatus::kNotRun: ++reports[k].not_run; break;
      }
      reports[k].resampled += slot.resampled;
    }
  }
  if (aborted) {
    throw EvaluationAborted("evaluation aborted by transport failure: " + error_message,
                            reports[0]);
  }
  return reports;
}

MetricReport named(std::string metric, std::map<std::string, std::string> params) {
  MetricReport r;
  r.metric = std::move(metric);
  r.params = std::move(params);
  return r;
}

std::size_t effective_max_len(const World& world, std::size_t requested) {
  return requested == 0 ? world.suffix_max_len() : requested;
}

double mean_of(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// Fold per-prefix-pair values into one slot value: the mean of those that
// are defined, not-applicable when none is.
SlotValue fold(const std::vector<std::optional<double>>& values) {
  std::vector<double> defined;
  for (const auto& v : values) {
    if (v) defined.push_back(*v);
  }
  if (defined.empty()) return {SlotStatus::kNotApplicable, 0.0};
  return {SlotStatus::kScore, mean_of(defined)};
}

// Every continuation sampled after `from` is accepted after `to`.
bool continuations_transfer(const GenerativeModel& model, TokenSpan from, TokenSpan to,
                            const AcceptanceRule& rule,
                            const genmodel::SuffixSampling& sampling) {
  for (const auto& x : genmodel::sample_suffixes(model, from, rule, sampling)) {
    if (x.tokens.empty()) continue;
    if (!genmodel::accepts_suffix(model, to, x.tokens, rule)) return false;
  }
  return true;
}

}  // namespace

std::optional<double> boundary_recall(const automata::BoundarySet& world_boundary,
                                      const SequenceJudge& judge, TokenSpan s1,
                                      TokenSpan s2) {
  if (world_boundary.empty()) return std::nullopt;
  std::size_t hit = 0;
  for (const TokenSeq& x : world_boundary) {
    if (judge.accepts(s1, x) && !judge.accepts(s2, x)) ++hit;
  }
  return static_cast<double>(hit) / static_cast<double>(world_boundary.size());
}

std::optional<double> boundary_recall(const automata::BoundarySet& world_boundary,
                                      const GenerativeModel& model, TokenSpan s1,
                                      TokenSpan s2, const AcceptanceRule& rule) {
  if (world_boundary.empty()) return std::nullopt;
  std::size_t hit = 0;
  for (const TokenSeq& x : world_boundary) {
    if (genmodel::accepts_suffix(model, s1, x, rule) &&
        !genmodel::accepts_suffix(model, s2, x, rule)) {
      ++hit;
    }
  }
  return static_cast<double>(hit) / static_cast<double>(world_boundary.size());
}

std::optional<double> boundary_precision(const automata::BoundarySet& model_boundary,
                                         const automata::Automaton& w, StateId q1,
                                         StateId q2) {
  if (model_boundary.empty()) {
    if (q1 == q2) return 1.0;
    return std::nullopt;
  }
  std::size_t hit = 0;
  for (const TokenSeq& x : model_boundary) {
    if (automata::accepts_from(w, q1, x) && !automata::accepts_from(w, q2, x)) ++hit;
  }
  return static_cast<double>(hit) / static_cast<double>(model_boundary.size());
}

automata::BoundarySet model_boundary_sampled(const GenerativeModel& model,
                                             TokenSpan s1, TokenSpan s2,
                                             const AcceptanceRule& rule,
                                             const genmodel::SuffixSampling& sampling) {
  automata::BoundarySet out(automata::BoundaryMode::kSampled, sampling.count);
  TokenSeq context(s2.begin(), s2.end());
  for (const auto& x : genmodel::sample_suffixes(model, s1, rule, sampling)) {
    context.resize(s2.size());
    for (std::size_t j = 0; j < x.tokens.size(); ++j) {
      const auto dist = model.next_dist(context);
      if (!rule.accepts(dist, x.tokens[j])) {
        out.insert(TokenSeq(x.tokens.begin(),
                            x.tokens.begin() + static_cast<std::ptrdiff_t>(j) + 1));
        break;
      }
      context.push_back(x.tokens[j]);
    }
  }
  return out;
}

MetricReport compression_precision(const World& world, const GenerativeModel& model,
                                   const AcceptanceRule& rule,
                                   const CompressionParams& params) {
  const std::size_t max_len = effective_max_len(world, params.max_len);
  auto report = named("compression_precision",
                      {{"rule", rule.to_string()},
                       {"states", std::to_string(params.num_states)},
                       {"prefix_pairs_per_state", std::to_string(params.prefix_pairs_per_state)},
                       {"M", std::to_string(params.samples)},
                       {"max_len", std::to_string(max_len)},
                       {"seed", std::to_string(params.seed)}});
  constexpr int kStateAttempts = 16;

  auto out = run_slots<1>(params.num_states, params.workers, {report}, [&](std::size_t i) {
    const std::uint64_t slot_seed = derive_seed(params.seed, i);
    Rng rng = make_rng(slot_seed);
    Slot<1> slot;
    slot.values[0].status = SlotStatus::kSkipped;
    for (int attempt = 0; attempt < kStateAttempts; ++attempt) {
      const StateId q = world.sample_state(rng);
      std::vector<double> pair_scores;
      for (std::size_t j = 0; j < params.prefix_pairs_per_state; ++j) {
        auto prefixes = world.sample_prefix_pair(q, rng);
        if (!prefixes) break;
        const auto& [s1, s2] = *prefixes;
        genmodel::SuffixSampling sampling{params.samples, max_len, world.end_token(), 0};
        sampling.seed = derive_seed(slot_seed, 2 * j + 1);
        bool ok = continuations_transfer(model, s1, s2, rule, sampling);
        if (ok) {
          sampling.seed = derive_seed(slot_seed, 2 * j + 2);
          ok = continuations_transfer(model, s2, s1, rule, sampling);
        }
        pair_scores.push_back(ok ? 1.0 : 0.0);
      }
      if (pair_scores.empty()) {
        spdlog::debug("compression slot {}: state {} has a single prefix, skipped", i,
                      world.automaton()->describe_state(q));
        continue;
      }
      slot.values[0] = {SlotStatus::kScore, mean_of(pair_scores)};
      break;
    }
    return slot;
  });
  return out[0];
}

DistinctionReports distinction_metrics(const World& world, const GenerativeModel& model,
                                       const AcceptanceRule& rule,
                                       const DistinctionParams& params) {
  const std::size_t max_len = effective_max_len(world, params.max_len);
  const auto w = world.automaton();
  const auto boundary = params.boundary.value_or(world.default_boundary());
  std::map<std::string, std::string> common{
      {"rule", rule.to_string()},
      {"pairs", std::to_string(params.num_pairs)},
      {"M", std::to_string(params.samples)},
      {"max_len", std::to_string(max_len)},
      {"boundary", boundary.mode == automata::BoundaryMode::kExactToDepth
                       ? "exact(k=" + std::to_string(boundary.depth) + ")"
                       : "sampled(M=" + std::to_string(boundary.samples) + ")"},
      {"seed", std::to_string(params.seed)}};

  auto out = run_slots<2>(
      params.num_pairs, params.workers,
      {named("distinction_precision", common), named("distinction_recall", common)},
      [&](std::size_t i) {
        const std::uint64_t slot_seed = derive_seed(params.seed, i);
        Rng rng = make_rng(slot_seed);
        Slot<2> slot;
        slot.values[0].status = slot.values[1].status = SlotStatus::kSkipped;
        for (std::size_t attempt = 0; attempt < params.max_resamples; ++attempt) {
          auto pair = world.sample_distinct_pair(rng);
          if (!pair) return slot;
          const auto truth = world.true_boundary(
              pair->q1, pair->q2, boundary,
              derive_seed(slot_seed, "true-boundary-" + std::to_string(attempt)));
          if (truth.empty()) {
            ++slot.resampled;
            spdlog::debug("distinction slot {}: empty true boundary, resampling", i);
            continue;
          }
          std::vector<std::optional<double>> precision, recall;
          for (std::size_t j = 0; j < params.prefix_pairs_per_pair; ++j) {
            if (j > 0) {
              pair->s1 = world.sample_prefix(pair->q1, rng);
              pair->s2 = world.sample_prefix(pair->q2, rng);
            }
            recall.push_back(boundary_recall(truth, model, pair->s1, pair->s2, rule));
            genmodel::SuffixSampling sampling{params.samples, max_len, world.end_token(),
                                              derive_seed(slot_seed, 1 + j)};
            const auto mine =
                model_boundary_sampled(model, pair->s1, pair->s2, rule, sampling);
            precision.push_back(boundary_precision(mine, *w, pair->q1, pair->q2));
          }
          slot.values[0] = fold(precision);
          slot.values[1] = fold(recall);
          return slot;
        }
        return slot;
      });
  return {std::move(out[0]), std::move(out[1])};
}

MetricReport next_token_test(const automata::Automaton& w, const GenerativeModel& model,
                             const std::vector<TokenSeq>& prefixes, std::size_t workers) {
  constexpr std::size_t kChunk = 64;
  auto report = named("next_token", {{"prefixes", std::to_string(prefixes.size())}});
  std::vector<double> scores(prefixes.size(), 0.0);
  const std::size_t chunks = (prefixes.size() + kChunk - 1) / kChunk;
  std::atomic<bool> aborted{false};
  std::vector<char> done(prefixes.size(), 0);
  std::string error_message;
  std::mutex error_mutex;

  parallel_for(chunks, workers, [&](std::size_t c) {
    if (aborted.load()) return;
    const std::size_t lo = c * kChunk;
    const std::size_t hi = std::min(prefixes.size(), lo + kChunk);
    std::vector<StateId> states(hi - lo);
    for (std::size_t i = lo; i < hi; ++i) {
      states[i - lo] = w.run(w.start(), prefixes[i]);
      if (states[i - lo] == w.reject()) {
        throw InputError("next_token_test: prefix is not valid in the world");
      }
    }
    std::vector<genmodel::NextDist> dists;
    try {
      dists = model.next_dist_batch(
          std::span<const TokenSeq>(prefixes.data() + lo, hi - lo));
    } catch (const TransportError& e) {
      std::lock_guard lock(error_mutex);
      if (!aborted.exchange(true)) error_message = e.what();
      return;
    }
    for (std::size_t i = lo; i < hi; ++i) {
      const auto top = dists[i - lo].argmax_set();
      bool ok = !top.empty();
      for (TokenId a : top) {
        if (w.step(states[i - lo], a) == w.reject()) {
          ok = false;
          break;
        }
      }
      scores[i] = ok ? 1.0 : 0.0;
      done[i] = 1;
    }
  });

  for (std::size_t i = 0; i < prefixes.size(); ++i) {
    if (done[i]) {
      report.scores.push_back(scores[i]);
    } else {
      ++report.not_run;
    }
  }
  if (aborted) {
    throw EvaluationAborted("evaluation aborted by transport failure: " + error_message,
                            report);
  }
  return report;
}

MetricReport next_token_test_sampled(const World& world, const GenerativeModel& model,
                                     std::size_t count, std::uint64_t seed,
                                     std::size_t workers) {
  std::vector<TokenSeq> prefixes(count);
  parallel_for(count, workers, [&](std::size_t i) {
    Rng rng = make_rng(derive_seed(seed, i));
    prefixes[i] = world.sample_test_prefix(rng);
  });
  auto report = next_token_test(*world.automaton(), model, prefixes, workers);
  report.params["seed"] = std::to_string(seed);
  return report;
}

MetricReport judged_compression_precision(const World& world, const SequenceJudge& judge,
                                          const JudgedCompressionParams& params) {
  auto report = named("compression_precision",
                      {{"mode", "judge"},
                       {"states", std::to_string(params.num_states)},
                       {"continuations", std::to_string(params.continuations)},
                       {"seed", std::to_string(params.seed)}});
  constexpr int kStateAttempts = 16;
  auto out = run_slots<1>(params.num_states, params.workers, {report}, [&](std::size_t i) {
    Rng rng = make_rng(derive_seed(params.seed, i));
    Slot<1> slot;
    slot.values[0].status = SlotStatus::kSkipped;
    for (int attempt = 0; attempt < kStateAttempts; ++attempt) {
      const StateId q = world.sample_state(rng);
      std::vector<double> pair_scores;
      for (std::size_t j = 0; j < params.prefix_pairs_per_state; ++j) {
        auto prefixes = world.sample_prefix_pair(q, rng);
        if (!prefixes) break;
        bool ok = true;
        for (std::size_t c = 0; c < params.continuations && ok; ++c) {
          const TokenSeq x = world.sample_judge_continuation(q, rng);
          ok = judge.accepts(prefixes->first, x) == judge.accepts(prefixes->second, x);
        }
        pair_scores.push_back(ok ? 1.0 : 0.0);
      }
      if (pair_scores.empty()) continue;
      slot.values[0] = {SlotStatus::kScore, mean_of(pair_scores)};
      break;
    }
    return slot;
  });
  return out[0];
}

MetricReport judged_distinction_recall(const World& world, const SequenceJudge& judge,
                                       const JudgedRecallParams& params) {
  const auto boundary = params.boundary.value_or(world.default_boundary());
  auto report = named("distinction_recall",
                      {{"mode", "judge"},
                       {"pairs", std::to_string(params.num_pairs)},
                       {"M", std::to_string(params.samples)},
                       {"seed", std::to_string(params.seed)}});
  auto out = run_slots<1>(params.num_pairs, params.workers, {report}, [&](std::size_t i) {
    const std::uint64_t slot_seed = derive_seed(params.seed, i);
    Rng rng = make_rng(slot_seed);
    Slot<1> slot;
    slot.values[0].status = SlotStatus::kSkipped;
    for (std::size_t attempt = 0; attempt < params.max_resamples; ++attempt) {
      auto pair = world.sample_distinct_pair(rng);
      if (!pair) return slot;
      const auto truth = world.true_boundary(
          pair->q1, pair->q2, boundary,
          derive_seed(slot_seed, "true-boundary-" + std::to_string(attempt)));
      if (truth.empty()) {
        ++slot.resampled;
        continue;
      }
      std::vector<const TokenSeq*> pool;
      for (const TokenSeq& x : truth) pool.push_back(&x);
      shuffle(pool.begin(), pool.end(), rng);
      const std::size_t m = std::min(params.samples, pool.size());
      std::size_t hit = 0;
      for (std::size_t j = 0; j < m; ++j) {
        if (judge.accepts(pair->s1, *pool[j]) && !judge.accepts(pair->s2, *pool[j])) ++hit;
      }
      slot.values[0] = {SlotStatus::kScore,
                        m == 0 ? 0.0 : static_cast<double>(hit) / static_cast<double>(m)};
      return slot;
    }
    return slot;
  });
  return out[0];
}

}  // namespace worldgauge::metrics
