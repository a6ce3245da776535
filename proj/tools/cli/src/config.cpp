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

#include "worldgauge/cli/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <type_traits>
#include <variant>

#include <toml.hpp>

#include "worldgauge/core/errors.hpp"

namespace worldgauge::cli {

namespace {

using FieldRef = std::variant<std::string*, std::int64_t*, double*, std::vector<std::string>*,
                              std::vector<double>*, std::optional<std::int64_t>*>;

struct Field {
  const char* section;  // "" for top-level keys
  const char* key;
  FieldRef ref;
};

std::vector<Field> fields(RunConfig& c) {
  auto& w = c.world;
  auto& m = c.model;
  auto& e = c.metrics;
  auto& d = c.data;
  auto& r = c.reconstruct;
  auto& t = c.detour;
  return {
      {"", "seed", &c.seed},
      {"", "workers", &c.workers},
      {"", "out", &c.out},
      {"world", "kind", &w.kind},
      {"world", "graph", &w.graph},
      {"world", "rows", &w.rows},
      {"world", "cols", &w.cols},
      {"world", "one_way_fraction", &w.one_way_fraction},
      {"world", "diagonal_fraction", &w.diagonal_fraction},
      {"world", "spacing", &w.spacing},
      {"world", "max_out_degree", &w.max_out_degree},
      {"world", "size", &w.size},
      {"world", "pool_games", &w.pool_games},
      {"world", "max_directions", &w.max_directions},
      {"model", "kind", &m.kind},
      {"model", "label", &m.label},
      {"model", "path", &m.path},
      {"model", "corruption", &m.corruption},
      {"model", "favoured", &m.favoured},
      {"model", "logit_scale", &m.logit_scale},
      {"model", "bridge_cmd", &m.bridge_cmd},
      {"model", "bridge_tcp", &m.bridge_tcp},
      {"model", "timeout", &m.timeout},
      {"metrics", "rule", &e.rule},
      {"metrics", "metrics", &e.metrics},
      {"metrics", "next_token_prefixes", &e.next_token_prefixes},
      {"metrics", "states", &e.states},
      {"metrics", "pairs", &e.pairs},
      {"metrics", "samples", &e.samples},
      {"metrics", "max_len", &e.max_len},
      {"metrics", "boundary", &e.boundary},
      {"metrics", "depth", &e.depth},
      {"metrics", "boundary_samples", &e.boundary_samples},
      {"metrics", "continuations", &e.continuations},
      {"metrics", "judge_samples", &e.judge_samples},
      {"metrics", "task_instances", &e.task_instances},
      {"metrics", "sweep", &e.sweep},
      {"data", "mode", &d.mode},
      {"data", "count", &d.count},
      {"data", "test_fraction", &d.test_fraction},
      {"data", "weight_functions", &d.weight_functions},
      {"data", "min_walk", &d.min_walk},
      {"data", "max_walk", &d.max_walk},
      {"data", "corpus", &d.corpus},
      {"data", "heldout", &d.heldout},
      {"data", "order", &d.order},
      {"data", "lambda", &d.lambda},
      {"reconstruct", "max_degree", &r.max_degree},
      {"reconstruct", "max_distance", &r.max_distance},
      {"reconstruct", "format", &r.format},
      {"reconstruct", "source", &r.source},
      {"reconstruct", "decoding", &r.decoding},
      {"reconstruct", "count", &r.count},
      {"detour", "probabilities", &t.probabilities},
      {"detour", "modes", &t.modes},
      {"detour", "trials", &t.trials},
      {"detour", "max_len", &t.max_len},
  };
}

std::string dotted(const Field& f) {
  return f.section[0] == '\0' ? std::string(f.key) : std::string(f.section) + "." + f.key;
}

[[noreturn]] void bad_value(const Field& f, const std::string& expected) {
  throw InputError("config key '" + dotted(f) + "' expects " + expected);
}

double node_double(const Field& f, const toml::node& n) {
  if (auto v = n.value_exact<double>()) return *v;
  if (auto v = n.value_exact<std::int64_t>()) return static_cast<double>(*v);
  bad_value(f, "a number");
}

void read_node(const Field& f, const toml::node& n) {
  std::visit(
      [&](auto* target) {
        using T = std::remove_pointer_t<decltype(target)>;
        if constexpr (std::is_same_v<T, std::string>) {
          auto v = n.value_exact<std::string>();
          if (!v) bad_value(f, "a string");
          *target = *v;
        } else if constexpr (std::is_same_v<T, std::int64_t>) {
          auto v = n.value_exact<std::int64_t>();
          if (!v) bad_value(f, "an integer");
          *target = *v;
        } else if constexpr (std::is_same_v<T, std::optional<std::int64_t>>) {
          auto v = n.value_exact<std::int64_t>();
          if (!v) bad_value(f, "an integer");
          *target = *v;
        } else if constexpr (std::is_same_v<T, double>) {
          *target = node_double(f, n);
        } else if constexpr (std::is_same_v<T, std::vector<std::string>>) {
          const auto* arr = n.as_array();
          if (arr == nullptr) bad_value(f, "an array of strings");
          target->clear();
          for (const auto& x : *arr) {
            auto v = x.value_exact<std::string>();
            if (!v) bad_value(f, "an array of strings");
            target->push_back(*v);
          }
        } else {
          const auto* arr = n.as_array();
          if (arr == nullptr) bad_value(f, "an array of numbers");
          target->clear();
          for (const auto& x : *arr) target->push_back(node_double(f, x));
        }
      },
      f.ref);
}

// Doubles are written with round-trip precision so that reading a config
// back reproduces it bit for bit.
std::string fmt_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  std::string s(buf, ptr);
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out.push_back(c);
        }
    }
  }
  return out + "\"";
}

// Returns "" for an unset optional, which is then omitted.
std::string render_value(const FieldRef& ref) {
  return std::visit(
      [](auto* target) -> std::string {
        using T = std::remove_pointer_t<decltype(target)>;
        if constexpr (std::is_same_v<T, std::string>) {
          return quote(*target);
        } else if constexpr (std::is_same_v<T, std::int64_t>) {
          return std::to_string(*target);
        } else if constexpr (std::is_same_v<T, std::optional<std::int64_t>>) {
          return *target ? std::to_string(**target) : std::string();
        } else if constexpr (std::is_same_v<T, double>) {
          return fmt_double(*target);
        } else if constexpr (std::is_same_v<T, std::vector<std::string>>) {
          std::string out = "[";
          for (std::size_t i = 0; i < target->size(); ++i) {
            out += (i ? ", " : "") + quote((*target)[i]);
          }
          return out + "]";
        } else {
          std::string out = "[";
          for (std::size_t i = 0; i < target->size(); ++i) {
            out += (i ? ", " : "") + fmt_double((*target)[i]);
          }
          return out + "]";
        }
      },
      ref);
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty() || !out.empty()) out.push_back(cur);
  return out;
}

std::int64_t parse_int(const Field& f, const std::string& text) {
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) bad_value(f, "an integer");
  return v;
}

double parse_double(const Field& f, const std::string& text) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) bad_value(f, "a number");
    return v;
  } catch (const std::logic_error&) {
    bad_value(f, "a number");
  }
}

}  // namespace

RunConfig config_from_toml(const std::string& text) {
  toml::table doc;
  try {
    doc = toml::parse(text);
  } catch (const toml::parse_error& e) {
    std::ostringstream msg;
    msg << "invalid TOML at line " << e.source().begin.line << ": " << e.description();
    throw InputError(msg.str());
  }
  RunConfig config;
  auto table = fields(config);
  auto find = [&](const std::string& section, const std::string& key) -> const Field* {
    for (const auto& f : table) {
      if (section == f.section && key == f.key) return &f;
    }
    return nullptr;
  };
  for (const auto& [k, node] : doc) {
    const std::string key(k.str());
    if (const auto* sub = node.as_table()) {
      bool known_section = false;
      for (const auto& f : table) known_section = known_section || key == f.section;
      if (!known_section) throw InputError("unknown config section [" + key + "]");
      for (const auto& [k2, node2] : *sub) {
        const Field* f = find(key, std::string(k2.str()));
        if (f == nullptr) throw InputError("unknown config key '" + key + "." + std::string(k2.str()) + "'");
        read_node(*f, node2);
      }
    } else {
      const Field* f = find("", key);
      if (f == nullptr) throw InputError("unknown config key '" + key + "'");
      read_node(*f, node);
    }
  }
  return config;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return config_from_toml(buf.str());
  } catch (const InputError& e) {
    throw InputError(path + ": " + e.what());
  }
}

std::string config_to_toml(const RunConfig& config) {
  auto copy = config;
  const auto table = fields(copy);
  std::ostringstream out;
  std::string section;
  for (const auto& f : table) {
    if (section != f.section) {
      section = f.section;
      out << "\n[" << section << "]\n";
    }
    const std::string value = render_value(f.ref);
    if (value.empty()) continue;
    out << f.key << " = " << value << '\n';
  }
  return out.str();
}

void apply_override(RunConfig& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw InputError("expected key=value, got '" + assignment + "'");
  }
  const std::string name = assignment.substr(0, eq);
  const std::string value = assignment.substr(eq + 1);
  const auto dot = name.find('.');
  const std::string section = dot == std::string::npos ? "" : name.substr(0, dot);
  const std::string key = dot == std::string::npos ? name : name.substr(dot + 1);
  for (const auto& f : fields(config)) {
    if (section != f.section || key != f.key) continue;
    std::visit(
        [&](auto* target) {
          using T = std::remove_pointer_t<decltype(target)>;
          if constexpr (std::is_same_v<T, std::string>) {
            *target = value;
          } else if constexpr (std::is_same_v<T, std::int64_t>) {
            *target = parse_int(f, value);
          } else if constexpr (std::is_same_v<T, std::optional<std::int64_t>>) {
            *target = parse_int(f, value);
          } else if constexpr (std::is_same_v<T, double>) {
            *target = parse_double(f, value);
          } else if constexpr (std::is_same_v<T, std::vector<std::string>>) {
            // Each override appends one entry, since entries contain commas.
            target->push_back(value);
          } else {
            target->clear();
            for (const auto& x : split_list(value)) target->push_back(parse_double(f, x));
          }
        },
        f.ref);
    return;
  }
  throw InputError("unknown config key '" + name + "'");
}

std::vector<std::string> config_keys() {
  RunConfig c;
  std::vector<std::string> out;
  for (const auto& f : fields(c)) out.push_back(dotted(f));
  return out;
}

}  // namespace worldgauge::cli
