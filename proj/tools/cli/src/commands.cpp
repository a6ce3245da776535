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

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <CLI/CLI11.hpp>
#include <nlohmann/json.hpp>
#include <spdlog/sinks/ostream_sink.h>
#include <spdlog/spdlog.h>

#include "worldgauge/automata/dfa.hpp"
#include "worldgauge/bridge/server.hpp"
#include "worldgauge/cli/builders.hpp"
#include "worldgauge/cli/cli.hpp"
#include "worldgauge/core/errors.hpp"
#include "worldgauge/core/parallel.hpp"
#include "worldgauge/detour/detour.hpp"
#include "worldgauge/genmodel/ngram.hpp"
#include "worldgauge/metrics/metrics.hpp"
#include "worldgauge/reconstruct/reconstruct.hpp"
#include "worldgauge/worlds/traversals.hpp"

namespace worldgauge::cli {

namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;
using genmodel::AcceptanceRule;

constexpr const char* kToolVersion = "0.1.0";

std::uint64_t require_seed(const RunConfig& c) {
  if (!c.seed) throw InputError("this command samples and needs --seed or WORLDGAUGE_SEED");
  if (*c.seed < 0) throw InputError("seed must be non-negative");
  return static_cast<std::uint64_t>(*c.seed);
}

std::optional<std::uint64_t> optional_seed(const RunConfig& c) {
  if (!c.seed) return std::nullopt;
  return require_seed(c);
}

std::size_t count_of(std::int64_t v, const char* what) {
  if (v < 0) throw InputError(std::string(what) + " must be non-negative");
  return static_cast<std::size_t>(v);
}

std::size_t workers_of(const RunConfig& c) {
  if (c.workers < 1) throw InputError("workers must be at least 1");
  return static_cast<std::size_t>(c.workers);
}

fs::path output_dir(const RunConfig& c) {
  const fs::path dir(c.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + c.out + ": " + ec.message());
  return dir;
}

void write_text(const fs::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write " + path.string());
  f << content;
  if (!f) throw IoError("write failed for " + path.string());
}

Json manifest(const std::string& command, const RunConfig& c) {
  Json m;
  m["tool"] = "worldgauge";
  m["version"] = kToolVersion;
  m["command"] = command;
  m["seed"] = c.seed ? Json(*c.seed) : Json(nullptr);
  m["config"] = config_to_toml(c);
  return m;
}

void write_manifest(const fs::path& dir, const Json& m) {
  write_text(dir / "manifest.json", m.dump(2) + "\n");
}

std::vector<std::string> split_commas(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

Json report_json(const metrics::MetricReport& r) {
  Json j;
  j["metric"] = r.metric;
  j["count"] = r.count();
  j["mean"] = r.scores.empty() ? Json(nullptr) : Json(r.mean());
  j["se"] = r.scores.empty() ? Json(nullptr) : Json(r.standard_error());
  j["not_applicable"] = r.not_applicable;
  j["skipped"] = r.skipped;
  j["resampled"] = r.resampled;
  j["not_run"] = r.not_run;
  Json params = Json::object();
  for (const auto& [k, v] : r.params) params[k] = v;
  j["params"] = std::move(params);
  return j;
}

const worlds::NavWorld& require_nav(const BuiltWorld& w, const char* command) {
  if (!w.nav) throw InputError(std::string(command) + " needs a navigation world (grid or graph)");
  return *w.nav;
}

// ---- world-gen --------------------------------------------------------------

int cmd_world_gen(const RunConfig& c, std::ostream& out) {
  const auto dir = output_dir(c);
  auto m = manifest("world-gen", c);
  if (c.world.kind == "grid") require_seed(c);
  const auto built = build_world(c.world, optional_seed(c));
  if (built.graph) {
    worlds::save_graph(*built.graph, (dir / "graph.json").string());
    m["outputs"] = {{"graph", "graph.json"}};
    m["nodes"] = built.graph->num_nodes();
    m["edges"] = built.graph->num_edges();
    m["strongly_connected"] = built.graph->strongly_connected();
    out << "graph: " << built.graph->num_nodes() << " nodes, " << built.graph->num_edges()
        << " edges -> " << (dir / "graph.json").string() << "\n";
  } else if (c.world.kind == "othello") {
    throw DomainError("the othello world is too large to materialize as a DFA file");
  } else {
    const auto mat = automata::materialize(*built.world->automaton(), 1u << 22);
    automata::save_dfa(mat.dfa, (dir / "world.dfa.json").string());
    m["outputs"] = {{"dfa", "world.dfa.json"}};
    m["states"] = mat.dfa.num_states();
    m["alphabet"] = mat.dfa.alphabet().size();
    out << "dfa: " << mat.dfa.num_states() << " states -> "
        << (dir / "world.dfa.json").string() << "\n";
  }
  write_manifest(dir, m);
  return exit_codes::kOk;
}

// ---- data-gen ---------------------------------------------------------------

int cmd_data_gen(const RunConfig& c, std::ostream& out) {
  const auto seed = require_seed(c);
  const auto built = build_world(c.world, seed);
  const auto& nav = require_nav(built, "data-gen");
  const auto dir = output_dir(c);

  worlds::TraversalParams tp;
  tp.mode = worlds::parse_traversal_mode(c.data.mode);
  tp.count = count_of(c.data.count, "data.count");
  tp.weight_functions = count_of(c.data.weight_functions, "data.weight_functions");
  tp.min_walk = count_of(c.data.min_walk, "data.min_walk");
  tp.max_walk = count_of(c.data.max_walk, "data.max_walk");
  tp.max_directions = count_of(c.world.max_directions, "world.max_directions");
  if (!(c.data.test_fraction >= 0.0 && c.data.test_fraction <= 1.0)) {
    throw InputError("data.test_fraction must lie in [0, 1]");
  }

  const auto traversals = worlds::gen_traversals(*built.graph, tp, derive_seed(seed, "traversals"));
  const auto corpus = worlds::encode_traversals(*nav.nav(), traversals);
  const auto split = worlds::split_by_pair(corpus, c.data.test_fraction, derive_seed(seed, "split"));

  std::set<std::pair<TokenId, TokenId>> train_pairs;
  std::set<std::pair<TokenId, TokenId>> test_pairs;
  for (const auto& s : split.train) train_pairs.emplace(s.at(0), s.at(1));
  for (const auto& s : split.test) test_pairs.emplace(s.at(0), s.at(1));
  for (const auto& p : test_pairs) {
    if (train_pairs.count(p) != 0) throw InternalError("train/test split shares an (origin, destination) pair");
  }

  const auto& alphabet = nav.alphabet();
  worlds::save_graph(*built.graph, (dir / "graph.json").string());
  worlds::write_corpus((dir / "train.txt").string(), alphabet, split.train);
  worlds::write_corpus((dir / "test.txt").string(), alphabet, split.test);

  auto m = manifest("data-gen", c);
  m["outputs"] = {{"graph", "graph.json"}, {"train", "train.txt"}, {"test", "test.txt"}};
  m["mode"] = worlds::to_string(tp.mode);
  m["requested"] = tp.count;
  m["generated"] = corpus.size();
  m["train_sequences"] = split.train.size();
  m["test_sequences"] = split.test.size();
  m["train_pairs"] = train_pairs.size();
  m["test_pairs"] = test_pairs.size();
  m["pairs_disjoint"] = true;
  write_manifest(dir, m);
  out << "corpus: " << split.train.size() << " train, " << split.test.size() << " test sequences -> "
      << dir.string() << "\n";
  return exit_codes::kOk;
}

// ---- train-ngram ------------------------------------------------------------

int cmd_train_ngram(const RunConfig& c, std::ostream& out) {
  if (c.data.corpus.empty()) throw InputError("train-ngram needs --corpus");
  const auto built = build_world(c.world, optional_seed(c));
  const auto& alphabet = built.world->alphabet();
  const auto corpus = worlds::read_corpus(c.data.corpus, alphabet);
  if (c.data.order < 1) throw InputError("data.order must be at least 1");
  const auto model = genmodel::train_ngram(alphabet, corpus, static_cast<std::size_t>(c.data.order),
                                           c.data.lambda);
  const auto dir = output_dir(c);
  genmodel::save_ngram(*model, (dir / "ngram.json").string());

  auto m = manifest("train-ngram", c);
  m["outputs"] = {{"model", "ngram.json"}};
  m["sequences"] = corpus.size();
  std::size_t tokens = 0;
  for (const auto& s : corpus) tokens += s.size();
  m["tokens"] = tokens;
  m["order"] = model->order();
  m["lambda"] = model->lambda();
  m["train_perplexity"] = genmodel::perplexity(*model, corpus);
  if (!c.data.heldout.empty()) {
    const auto heldout = worlds::read_corpus(c.data.heldout, alphabet);
    const double ppl = genmodel::perplexity(*model, heldout);
    m["heldout_sequences"] = heldout.size();
    m["heldout_perplexity"] = ppl;
    out << "held-out perplexity: " << ppl << "\n";
  }
  write_manifest(dir, m);
  out << "n-gram (order " << model->order() << ") -> " << (dir / "ngram.json").string() << "\n";
  return exit_codes::kOk;
}

// ---- eval -------------------------------------------------------------------

struct Variant {
  std::string label;
  AcceptanceRule rule;
  RunConfig config;
};

std::vector<Variant> eval_variants(const RunConfig& c, const std::string& label) {
  const auto base_rule = AcceptanceRule::parse(c.metrics.rule);
  if (c.metrics.sweep.empty()) return {{label, base_rule, c}};
  std::vector<Variant> out;
  for (const auto& entry : c.metrics.sweep) {
    const auto eq = entry.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw InputError("--sweep expects key=v1,v2,..., got '" + entry + "'");
    }
    const std::string key = entry.substr(0, eq);
    const auto values = split_commas(entry.substr(eq + 1));
    if (values.empty()) throw InputError("--sweep '" + key + "' lists no values");
    for (const auto& v : values) {
      Variant var{label + " " + key + "=" + v, base_rule, c};
      if (key == "epsilon" || key == "top_k" || key == "top_p") {
        var.rule = AcceptanceRule::parse(key + "=" + v);
        var.config.metrics.rule = var.rule.to_string();
      } else if (key == "rule" || key == "sweep") {
        throw InputError("cannot sweep '" + key + "'; sweep epsilon, top_k or top_p instead");
      } else {
        apply_override(var.config, "metrics." + key + "=" + v);
      }
      var.config.metrics.sweep.clear();
      out.push_back(std::move(var));
    }
  }
  return out;
}

std::optional<worlds::BoundaryConfig> boundary_of(const MetricSpec& m, const worlds::World& w) {
  if (m.boundary == "default") return std::nullopt;
  worlds::BoundaryConfig b;
  if (m.boundary == "exact") {
    b.mode = automata::BoundaryMode::kExactToDepth;
    b.depth = count_of(m.depth, "metrics.depth");
  } else if (m.boundary == "sampled") {
    b.mode = automata::BoundaryMode::kSampled;
    b.samples = count_of(m.boundary_samples, "metrics.boundary_samples");
    b.max_len = m.max_len > 0 ? static_cast<std::size_t>(m.max_len) : w.suffix_max_len();
  } else {
    throw InputError("metrics.boundary must be default, exact or sampled");
  }
  return b;
}

std::set<std::string> wanted_metrics(const MetricSpec& m, const BuiltWorld& w,
                                     const BuiltModel& model) {
  if (m.metrics == "auto") {
    std::set<std::string> s{"compression", "distinction"};
    if (model.model) s.insert("next_token");
    if (w.seating) s.insert("task");
    return s;
  }
  std::set<std::string> s;
  for (const auto& x : split_commas(m.metrics)) {
    if (x != "next_token" && x != "compression" && x != "distinction" && x != "task") {
      throw InputError("unknown metric '" + x + "'");
    }
    s.insert(x);
  }
  if (s.empty()) throw InputError("no metrics selected");
  return s;
}

// Fills `row` metric by metric so a transport failure leaves every finished
// column in place, plus the partial one.
void evaluate(const Variant& v, const BuiltWorld& w, const BuiltModel& bm, std::uint64_t seed,
              std::size_t workers, metrics::SummaryRow& row) {
  const auto& m = v.config.metrics;
  const auto& world = *w.world;
  const auto wanted = wanted_metrics(m, w, bm);
  const auto boundary = boundary_of(m, world);
  const std::size_t max_len = count_of(m.max_len, "metrics.max_len");
  row.label = v.label;

  auto guarded = [&](std::optional<metrics::MetricReport>& slot, auto&& fn) {
    try {
      slot = fn();
    } catch (const metrics::EvaluationAborted& e) {
      slot = e.partial();
      throw;
    }
  };

  if (bm.model) {
    if (wanted.count("next_token")) {
      guarded(row.next_token, [&] {
        return metrics::next_token_test_sampled(world, *bm.model,
                                                count_of(m.next_token_prefixes, "metrics.next_token_prefixes"),
                                                derive_seed(seed, "next-token"), workers);
      });
    }
    if (wanted.count("compression")) {
      metrics::CompressionParams p;
      p.num_states = count_of(m.states, "metrics.states");
      p.samples = count_of(m.samples, "metrics.samples");
      p.max_len = max_len;
      p.seed = derive_seed(seed, "compression");
      p.workers = workers;
      guarded(row.compression,
              [&] { return metrics::compression_precision(world, *bm.model, v.rule, p); });
    }
    if (wanted.count("distinction")) {
      metrics::DistinctionParams p;
      p.num_pairs = count_of(m.pairs, "metrics.pairs");
      p.samples = count_of(m.samples, "metrics.samples");
      p.max_len = max_len;
      p.boundary = boundary;
      p.seed = derive_seed(seed, "distinction");
      p.workers = workers;
      try {
        auto r = metrics::distinction_metrics(world, *bm.model, v.rule, p);
        row.distinction_precision = std::move(r.precision);
        row.distinction_recall = std::move(r.recall);
      } catch (const metrics::EvaluationAborted& e) {
        row.distinction_precision = e.partial();
        throw;
      }
    }
  } else {
    if (wanted.count("next_token")) {
      throw InputError("the model only answers accept/reject queries; drop next_token");
    }
    if (wanted.count("compression")) {
      metrics::JudgedCompressionParams p;
      p.num_states = count_of(m.states, "metrics.states");
      p.continuations = count_of(m.continuations, "metrics.continuations");
      p.seed = derive_seed(seed, "compression");
      p.workers = workers;
      guarded(row.compression,
              [&] { return metrics::judged_compression_precision(world, *bm.judge, p); });
    }
    if (wanted.count("distinction")) {
      metrics::JudgedRecallParams p;
      p.num_pairs = count_of(m.pairs, "metrics.pairs");
      p.samples = count_of(m.judge_samples, "metrics.judge_samples");
      p.boundary = boundary;
      p.seed = derive_seed(seed, "distinction");
      p.workers = workers;
      guarded(row.distinction_recall,
              [&] { return metrics::judged_distinction_recall(world, *bm.judge, p); });
    }
  }
  if (wanted.count("task")) {
    if (!w.seating) throw InputError("the task metric needs the seating world");
    genmodel::JudgeHandle judge = bm.judge;
    if (!judge) judge = std::make_shared<const genmodel::RuleJudge>(bm.model, v.rule);
    guarded(row.task_accuracy, [&] {
      return worlds::seating_task_accuracy(*w.seating, *judge,
                                           count_of(m.task_instances, "metrics.task_instances"),
                                           derive_seed(seed, "task"));
    });
  }
}

Json row_json(const metrics::SummaryRow& row, const Variant& v) {
  Json j;
  j["label"] = row.label;
  j["rule"] = v.rule.to_string();
  Json reports = Json::array();
  for (const auto* r : {&row.next_token, &row.compression, &row.distinction_precision,
                        &row.distinction_recall, &row.task_accuracy}) {
    if (*r) reports.push_back(report_json(**r));
  }
  j["reports"] = std::move(reports);
  return j;
}

int cmd_eval(const RunConfig& c, std::ostream& out) {
  const auto seed = require_seed(c);
  const auto workers = workers_of(c);
  const auto built = build_world(c.world, seed);
  const auto model = build_model(c.model, built, seed, workers);
  const auto variants = eval_variants(c, model.label);
  const auto dir = output_dir(c);

  std::vector<metrics::SummaryRow> rows;
  Json rows_json = Json::array();
  auto m = manifest("eval", c);
  m["world"] = built.world->name();
  m["model"] = model.label;
  m["mode"] = model.model ? "next_distribution" : "accept_judgment";

  auto flush = [&] {
    write_text(dir / "report.csv", metrics::to_csv(rows));
    write_text(dir / "report.md", metrics::to_markdown(rows));
    m["outputs"] = {{"csv", "report.csv"}, {"markdown", "report.md"}};
    m["rows"] = rows_json;
    write_manifest(dir, m);
  };

  for (const auto& v : variants) {
    rows.emplace_back();
    try {
      evaluate(v, built, model, seed, workers, rows.back());
    } catch (const metrics::EvaluationAborted& e) {
      rows_json.push_back(row_json(rows.back(), v));
      m["aborted"] = e.what();
      flush();
      throw;
    }
    rows_json.push_back(row_json(rows.back(), v));
  }
  flush();
  out << metrics::to_markdown(rows);
  return exit_codes::kOk;
}

// ---- reconstruct ------------------------------------------------------------

std::vector<std::pair<worlds::NodeId, worlds::NodeId>> headers_for(const RunConfig& c,
                                                                    const worlds::NavWorld& nav) {
  if (!c.data.corpus.empty()) {
    const auto corpus = worlds::read_corpus(c.data.corpus, nav.alphabet());
    auto headers = detour::corpus_headers(*nav.nav(), corpus);
    if (headers.empty()) throw InputError("corpus " + c.data.corpus + " holds no headers");
    return headers;
  }
  std::vector<std::pair<worlds::NodeId, worlds::NodeId>> all;
  const auto v = static_cast<worlds::NodeId>(nav.nav()->num_nodes());
  for (worlds::NodeId o = 0; o < v; ++o) {
    for (worlds::NodeId d = 0; d < v; ++d) {
      if (o != d) all.emplace_back(o, d);
    }
  }
  return all;
}

int cmd_reconstruct(const RunConfig& c, std::ostream& out) {
  const auto& r = c.reconstruct;
  const auto format = reconstruct::parse_map_format(r.format);
  const auto built = build_world(c.world, optional_seed(c));
  const auto& nav = require_nav(built, "reconstruct");

  std::vector<TokenSeq> seqs;
  std::string label = "corpus";
  if (r.source == "corpus") {
    if (c.data.corpus.empty()) throw InputError("reconstruct from a corpus needs --corpus");
    seqs = worlds::read_corpus(c.data.corpus, nav.alphabet());
  } else if (r.source == "model") {
    const auto seed = require_seed(c);
    const auto model = build_model(c.model, built, seed, workers_of(c));
    if (!model.model) throw InputError("reconstruct needs a next-token model");
    label = model.label;
    detour::Decoding decoding;
    if (r.decoding == "greedy") {
      decoding = detour::Decoding::kGreedy;
    } else if (r.decoding == "sample") {
      decoding = detour::Decoding::kSample;
    } else {
      throw InputError("reconstruct.decoding must be greedy or sample");
    }
    const auto headers = headers_for(c, nav);
    const auto count = count_of(r.count, "reconstruct.count");
    seqs.resize(count);
    const auto max_dirs = count_of(c.world.max_directions, "world.max_directions");
    parallel_for(count, workers_of(c), [&](std::size_t i) {
      Rng rng(derive_seed(derive_seed(seed, "decode"), i));
      const auto& [o, d] = headers[uniform_index(rng, headers.size())];
      seqs[i] = detour::decode_route(*model.model, *nav.nav(), o, d, decoding, max_dirs, rng);
    });
  } else {
    throw InputError("reconstruct.source must be corpus or model");
  }

  reconstruct::ReconParams params;
  params.max_degree = count_of(r.max_degree, "reconstruct.max_degree");
  params.max_edge_distance = r.max_distance;
  const auto result = reconstruct::reconstruct(seqs, *nav.nav(), params);
  const auto counts = reconstruct::classify_edges(result, *built.graph);

  const auto dir = output_dir(c);
  const char* ext = format == reconstruct::MapFormat::kJson      ? "map.json"
                    : format == reconstruct::MapFormat::kDot     ? "map.dot"
                                                                 : "map.geojson";
  reconstruct::export_map(result, *built.graph, format, (dir / ext).string());

  Json report;
  report["source"] = label;
  report["sequences"] = result.sequences;
  report["failed_sequences"] = result.failed();
  report["edges"] = result.edges.size();
  report["true_edges"] = counts.true_edges;
  report["false_edges"] = counts.false_edges;
  report["true_graph_edges"] = built.graph->num_edges();
  Json failures = Json::array();
  for (const auto& f : result.failures) failures.push_back({{"index", f.index}, {"reason", f.reason}});
  report["failures"] = std::move(failures);
  write_text(dir / "reconstruct.json", report.dump(2) + "\n");

  auto m = manifest("reconstruct", c);
  m["outputs"] = {{"map", ext}, {"report", "reconstruct.json"}};
  m["sequences"] = result.sequences;
  m["failed_sequences"] = result.failed();
  m["true_edges"] = counts.true_edges;
  m["false_edges"] = counts.false_edges;
  write_manifest(dir, m);
  out << "reconstruct: " << result.sequences << " sequences, " << result.failed() << " failed, "
      << counts.true_edges << " true edges, " << counts.false_edges << " false edges\n";
  return exit_codes::kOk;
}

// ---- detour -----------------------------------------------------------------

std::string fixed2(double v) {
  std::ostringstream s;
  s.setf(std::ios::fixed);
  s.precision(2);
  s << v;
  return s.str();
}

int cmd_detour(const RunConfig& c, std::ostream& out) {
  const auto seed = require_seed(c);
  const auto workers = workers_of(c);
  const auto built = build_world(c.world, seed);
  const auto model = build_model(c.model, built, seed, workers);
  if (!model.model) throw InputError("detour needs a next-token model");
  const auto& t = c.detour;
  std::vector<detour::DetourMode> modes;
  for (const auto& x : split_commas(t.modes)) modes.push_back(detour::parse_detour_mode(x));
  if (modes.empty() || t.probabilities.empty()) throw InputError("detour needs modes and probabilities");
  for (double p : t.probabilities) {
    if (!(p >= 0.0 && p <= 1.0)) throw InputError("detour probabilities must lie in [0, 1]");
  }

  std::vector<std::pair<worlds::NodeId, worlds::NodeId>> headers;
  if (built.nav) headers = headers_for(c, *built.nav);

  std::ostringstream csv;
  csv << "label,mode,p,mean,se,count,detours,blocked_detours\n";
  std::ostringstream md;
  md << "| Model | Mode |";
  for (double p : t.probabilities) md << " p=" << p << " |";
  md << "\n|---|---|";
  for (std::size_t i = 0; i < t.probabilities.size(); ++i) md << "---|";
  md << "\n";
  Json rows = Json::array();

  for (auto mode : modes) {
    md << "| " << model.label << " | " << detour::to_string(mode) << " |";
    for (std::size_t i = 0; i < t.probabilities.size(); ++i) {
      detour::DetourConfig cfg;
      cfg.probability = t.probabilities[i];
      cfg.mode = mode;
      cfg.trials = count_of(t.trials, "detour.trials");
      cfg.max_len = count_of(t.max_len, "detour.max_len");
      cfg.workers = workers;
      // One stream per probability, shared across modes.
      const auto run_seed = derive_seed(derive_seed(seed, "detour"), i);
      const auto rep = built.nav ? detour::run_detours(*built.nav, *model.model, headers, cfg, run_seed)
                                 : detour::run_detours_game(*built.world, *model.model, cfg, run_seed);
      csv.precision(17);
      csv << model.label << ',' << detour::to_string(mode) << ',' << cfg.probability << ','
          << rep.validity.mean() << ',' << rep.validity.standard_error() << ','
          << rep.validity.count() << ',' << rep.detours << ',' << rep.blocked_detours << '\n';
      md << ' ' << fixed2(rep.validity.mean()) << " |";
      Json r = report_json(rep.validity);
      r["mode"] = detour::to_string(mode);
      r["p"] = cfg.probability;
      r["detours"] = rep.detours;
      r["blocked_detours"] = rep.blocked_detours;
      rows.push_back(std::move(r));
    }
    md << "\n";
  }

  const auto dir = output_dir(c);
  write_text(dir / "detour.csv", csv.str());
  write_text(dir / "detour.md", md.str());
  auto m = manifest("detour", c);
  m["outputs"] = {{"csv", "detour.csv"}, {"markdown", "detour.md"}};
  m["model"] = model.label;
  m["rows"] = std::move(rows);
  write_manifest(dir, m);
  out << md.str();
  return exit_codes::kOk;
}

// ---- report -----------------------------------------------------------------

// Merges eval CSV files into one summary table, rows in first-seen order.
int cmd_report(const RunConfig& c, const std::vector<std::string>& inputs, std::ostream& out) {
  if (inputs.empty()) throw InputError("report needs at least one --input CSV");
  static const std::vector<std::pair<std::string, std::string>> columns = {
      {"next_token", "Next-token test"},
      {"compression_precision", "Compression precision"},
      {"distinction_precision", "Distinction precision"},
      {"distinction_recall", "Distinction recall"},
      {"task_accuracy", "Task accuracy"}};
  std::vector<std::string> labels;
  std::map<std::string, std::map<std::string, std::string>> cells;
  bool with_task = false;
  for (const auto& path : inputs) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (lineno == 1 || line.empty()) continue;
      std::vector<std::string> f;
      std::stringstream ss(line);
      std::string x;
      while (std::getline(ss, x, ',')) f.push_back(x);
      if (f.size() < 5) throw InputError(path + ":" + std::to_string(lineno) + ": malformed row");
      if (!cells.count(f[0])) labels.push_back(f[0]);
      std::string cell = "n/a";
      if (!f[2].empty()) {
        try {
          cell = fixed2(std::stod(f[2])) + " (" + fixed2(std::stod(f[3])) + ")";
        } catch (const std::logic_error&) {
          throw InputError(path + ":" + std::to_string(lineno) + ": malformed number");
        }
      }
      cells[f[0]][f[1]] = cell;
      with_task = with_task || f[1] == "task_accuracy";
    }
  }
  std::ostringstream md;
  const std::size_t ncol = with_task ? columns.size() : columns.size() - 1;
  md << "| Model |";
  for (std::size_t i = 0; i < ncol; ++i) md << ' ' << columns[i].second << " |";
  md << "\n|---|";
  for (std::size_t i = 0; i < ncol; ++i) md << "---|";
  md << "\n";
  for (const auto& label : labels) {
    md << "| " << label << " |";
    for (std::size_t i = 0; i < ncol; ++i) {
      const auto& row = cells[label];
      const auto it = row.find(columns[i].first);
      md << ' ' << (it == row.end() ? "-" : it->second) << " |";
    }
    md << "\n";
  }
  const auto dir = output_dir(c);
  write_text(dir / "summary.md", md.str());
  out << md.str();
  return exit_codes::kOk;
}

// ---- argument handling ------------------------------------------------------

std::optional<std::string> prescan_config(const std::vector<std::string>& args) {
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) return args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) return args[i].substr(9);
  }
  return std::nullopt;
}

void apply_env_seed(RunConfig& c, const std::optional<std::int64_t>& flag) {
  if (flag) {
    c.seed = flag;
    return;
  }
  if (c.seed) return;
  if (const char* env = std::getenv("WORLDGAUGE_SEED"); env != nullptr && *env != '\0') {
    RunConfig probe;
    try {
      apply_override(probe, std::string("seed=") + env);
    } catch (const InputError&) {
      throw InputError(std::string("WORLDGAUGE_SEED is not an integer: ") + env);
    }
    c.seed = probe.seed;
  }
}

int report_failure(std::ostream& err, const char* kind, const std::exception& e, int code) {
  err << "worldgauge: " << kind << ": " << e.what() << "\n";
  return code;
}

template <class Fn>
int guarded_main(std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const metrics::EvaluationAborted& e) {
    return report_failure(err, "evaluation aborted", e, exit_codes::kTransport);
  } catch (const TransportError& e) {
    return report_failure(err, "transport error", e, exit_codes::kTransport);
  } catch (const ProtocolError& e) {
    return report_failure(err, "bridge protocol error", e, exit_codes::kTransport);
  } catch (const InputError& e) {
    return report_failure(err, "usage error", e, exit_codes::kUsage);
  } catch (const DomainError& e) {
    return report_failure(err, "domain error", e, exit_codes::kDomain);
  } catch (const IoError& e) {
    return report_failure(err, "i/o error", e, exit_codes::kDomain);
  } catch (const std::exception& e) {
    return report_failure(err, "error", e, exit_codes::kDomain);
  }
}

class LogScope {
 public:
  LogScope(std::ostream& err, bool verbose) : previous_(spdlog::default_logger()) {
    auto sink = std::make_shared<spdlog::sinks::ostream_sink_mt>(err);
    auto logger = std::make_shared<spdlog::logger>("worldgauge", sink);
    logger->set_pattern("[%l] %v");
    logger->set_level(verbose ? spdlog::level::debug : spdlog::level::warn);
    spdlog::set_default_logger(logger);
  }
  ~LogScope() { spdlog::set_default_logger(previous_); }

 private:
  std::shared_ptr<spdlog::logger> previous_;
};

void add_world_options(CLI::App& app, WorldSpec& w) {
  app.add_option("--world", w.kind, "World kind: grid, graph, connect4, othello, seating");
  app.add_option("--graph", w.graph, "Street graph file (world kind graph)");
  app.add_option("--rows", w.rows, "Grid rows");
  app.add_option("--cols", w.cols, "Grid columns");
  app.add_option("--size", w.size, "Connect-4 column height or seating people");
}

void add_model_options(CLI::App& app, ModelSpec& m) {
  app.add_option("--model", m.kind,
                 "Model kind: exact, exact-weighted, uniform, random, corrupted, ngram, bridge, "
                 "exact-judge");
  app.add_option("--model-path", m.path, "n-gram model file");
  app.add_option("--label", m.label, "Row label in reports");
  app.add_option("--corruption", m.corruption, "Relabelling probability of the corrupted model");
  app.add_option("--bridge-cmd", m.bridge_cmd, "Bridge peer command line (stdio transport)");
  app.add_option("--bridge-tcp", m.bridge_tcp, "Bridge peer host:port");
  app.add_option("--bridge-timeout", m.timeout, "Seconds to wait for each bridge response");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  return guarded_main(err, [&]() -> int {
    RunConfig config;
    if (auto path = prescan_config(args)) config = load_config(*path);

    CLI::App app{"worldgauge: evaluate implicit world models of generative sequence models"};
    app.require_subcommand(1);
    app.fallthrough();
    std::string config_path;
    std::optional<std::int64_t> seed_flag;
    std::vector<std::string> sets;
    bool verbose = false;
    app.add_option("--config", config_path, "TOML run configuration");
    app.add_option("--seed", seed_flag, "Master seed (falls back to WORLDGAUGE_SEED)");
    app.add_option("--workers", config.workers, "Worker threads");
    app.add_option("--out,-o", config.out, "Output directory");
    app.add_option("--set", sets, "Override any config key, section.key=value (applied last)");
    app.add_flag("--verbose,-v", verbose, "Debug logging on stderr");
    add_world_options(app, config.world);

    auto* world_gen = app.add_subcommand("world-gen", "Generate a street graph or world DFA");
    auto* data_gen = app.add_subcommand("data-gen", "Generate train/test traversal corpora");
    data_gen->add_option("--mode", config.data.mode, "shortest, noisy or random-walk");
    data_gen->add_option("--count", config.data.count, "Sequences to generate");
    data_gen->add_option("--test-fraction", config.data.test_fraction, "Share of pairs held out");

    auto* train = app.add_subcommand("train-ngram", "Train an n-gram model on a corpus");
    train->add_option("--corpus", config.data.corpus, "Training corpus");
    train->add_option("--heldout", config.data.heldout, "Held-out corpus for perplexity");
    train->add_option("--order", config.data.order, "n-gram order");
    train->add_option("--lambda", config.data.lambda, "Additive smoothing");

    auto* eval = app.add_subcommand("eval", "Next-token, compression and distinction metrics");
    add_model_options(*eval, config.model);
    eval->add_option("--rule", config.metrics.rule, "epsilon=E, top_k=K or top_p=P");
    eval->add_option("--metrics", config.metrics.metrics,
                     "auto, or a comma list of next_token, compression, distinction, task");
    eval->add_option("--states", config.metrics.states, "States for compression");
    eval->add_option("--pairs", config.metrics.pairs, "State pairs for distinction");
    eval->add_option("--samples", config.metrics.samples, "Model boundary samples (M)");
    eval->add_option("--depth", config.metrics.depth, "Exact boundary depth (k)");
    eval->add_option("--max-len", config.metrics.max_len, "Sampled suffix length cap");
    eval->add_option("--boundary", config.metrics.boundary, "default, exact or sampled");
    eval->add_option("--next-token-prefixes", config.metrics.next_token_prefixes,
                     "Prefixes for the next-token test");
    eval->add_option("--sweep", config.metrics.sweep, "Ablation, e.g. epsilon=1e-6,1e-4,1e-2");

    auto* recon = app.add_subcommand("reconstruct", "Rebuild a street map from sequences");
    add_model_options(*recon, config.model);
    recon->add_option("--corpus", config.data.corpus, "Sequences, or headers with --source model");
    recon->add_option("--source", config.reconstruct.source, "corpus or model");
    recon->add_option("--decoding", config.reconstruct.decoding, "greedy or sample");
    recon->add_option("--sequences", config.reconstruct.count, "Sequences to decode from the model");
    recon->add_option("--max-degree", config.reconstruct.max_degree, "Out-degree budget");
    recon->add_option("--max-dist-miles,--max-distance", config.reconstruct.max_distance, "Longest new edge (miles)");
    recon->add_option("--format", config.reconstruct.format, "json, dot or geojson");

    auto* det = app.add_subcommand("detour", "Validity under random or adversarial detours");
    add_model_options(*det, config.model);
    det->add_option("--corpus", config.data.corpus, "Corpus supplying (origin, destination) headers");
    det->add_option("--detour-prob,--p", config.detour.probabilities, "Detour probabilities")->delimiter(',');
    det->add_option("--mode,--modes", config.detour.modes, "random, adversarial or both (comma list)");
    det->add_option("--trials", config.detour.trials, "Trials per probability");
    det->add_option("--detour-max-len", config.detour.max_len, "Direction budget");

    std::vector<std::string> inputs;
    auto* report = app.add_subcommand("report", "Merge eval CSV files into one table");
    report->add_option("--input,-i", inputs, "eval report.csv files")->required();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
      app.parse(reversed);
    } catch (const CLI::ParseError& e) {
      const int code = app.exit(e, out, err);
      return code == 0 ? exit_codes::kOk : exit_codes::kUsage;
    }
    for (const auto& s : sets) apply_override(config, s);
    apply_env_seed(config, seed_flag);
    LogScope logs(err, verbose);

    if (app.got_subcommand(world_gen)) return cmd_world_gen(config, out);
    if (app.got_subcommand(data_gen)) return cmd_data_gen(config, out);
    if (app.got_subcommand(train)) return cmd_train_ngram(config, out);
    if (app.got_subcommand(eval)) return cmd_eval(config, out);
    if (app.got_subcommand(recon)) return cmd_reconstruct(config, out);
    if (app.got_subcommand(det)) return cmd_detour(config, out);
    return cmd_report(config, inputs, out);
  });
}

int run_bridge_serve(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
                     std::ostream& err) {
  return guarded_main(err, [&]() -> int {
    RunConfig config;
    if (auto path = prescan_config(args)) config = load_config(*path);
    CLI::App app{"worldgauge-bridge: serve a built-in model over the bridge protocol"};
    std::string config_path;
    std::optional<std::int64_t> seed_flag;
    std::vector<std::string> sets;
    std::string capability = "auto";
    std::string judge_rule;
    int tcp_port = -1;
    std::size_t max_connections = 0;
    app.add_option("--config", config_path, "TOML run configuration");
    app.add_option("--seed", seed_flag, "Master seed (falls back to WORLDGAUGE_SEED)");
    app.add_option("--set", sets, "Override any config key, section.key=value");
    add_world_options(app, config.world);
    add_model_options(app, config.model);
    app.add_option("--capability", capability, "auto, next, judge or both");
    app.add_option("--judge-rule", judge_rule,
                   "Serve accept judgments of the model under this rule (e.g. epsilon=0.01)");
    app.add_option("--tcp", tcp_port, "Listen on 127.0.0.1:PORT instead of stdio (0 = any)");
    app.add_option("--max-connections", max_connections, "Exit after this many TCP connections");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
      app.parse(reversed);
    } catch (const CLI::ParseError& e) {
      const int code = app.exit(e, err, err);
      return code == 0 ? exit_codes::kOk : exit_codes::kUsage;
    }
    for (const auto& s : sets) apply_override(config, s);
    apply_env_seed(config, seed_flag);
    if (config.model.kind == "bridge") throw InputError("a bridge server cannot serve a bridge model");
    LogScope logs(err, false);

    const std::uint64_t seed = config.seed ? require_seed(config) : 0;
    const auto built = build_world(config.world, config.world.kind == "grid" ? std::optional(seed)
                                                                             : optional_seed(config));
    auto model = build_model(config.model, built, seed, 1);
    genmodel::ModelHandle serve_model = model.model;
    genmodel::JudgeHandle serve_judge = model.judge;
    if (!judge_rule.empty()) {
      if (!model.model) throw InputError("--judge-rule needs a next-token model");
      serve_judge = std::make_shared<const genmodel::RuleJudge>(
          model.model, AcceptanceRule::parse(judge_rule));
    }
    if (capability == "next") {
      serve_judge.reset();
    } else if (capability == "judge") {
      if (!serve_judge) throw InputError("--capability judge needs a judge (see --judge-rule)");
      serve_model.reset();
    } else if (capability == "both") {
      if (!serve_model || !serve_judge) throw InputError("--capability both needs a model and a judge");
    } else if (capability != "auto") {
      throw InputError("--capability must be auto, next, judge or both");
    }
    if (!serve_model && !serve_judge) throw InputError("nothing to serve");

    const bridge::BridgeServer server(serve_model, serve_judge);
    if (tcp_port >= 0) {
      if (tcp_port > 65535) throw InputError("--tcp port out of range");
      server.serve_tcp(static_cast<std::uint16_t>(tcp_port), max_connections,
                       [&](std::uint16_t port) { out << "listening " << port << std::endl; });
    } else {
      server.serve(in, out);
    }
    return exit_codes::kOk;
  });
}

}  // namespace worldgauge::cli
