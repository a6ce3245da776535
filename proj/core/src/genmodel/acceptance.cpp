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

#include "worldgauge/genmodel/acceptance.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "worldgauge/core/errors.hpp"

namespace worldgauge::genmodel {

AcceptanceRule AcceptanceRule::epsilon(double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw InputError("epsilon must lie in (0, 1)");
  return AcceptanceRule(Kind::kEpsilon, eps);
}

AcceptanceRule AcceptanceRule::top_k(std::size_t k) {
  if (k < 1) throw InputError("top_k requires k >= 1");
  return AcceptanceRule(Kind::kTopK, static_cast<double>(k));
}

AcceptanceRule AcceptanceRule::top_p(double p) {
  if (!(p > 0.0 && p <= 1.0)) throw InputError("top_p requires p in (0, 1]");
  return AcceptanceRule(Kind::kTopP, p);
}

AcceptanceRule AcceptanceRule::parse(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos) {
    throw InputError("acceptance rule must look like kind=value, got '" + text + "'");
  }
  const std::string kind = text.substr(0, eq);
  const std::string value = text.substr(eq + 1);
  double v = 0.0;
  try {
    std::size_t used = 0;
    v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
  } catch (const std::exception&) {
    throw InputError("acceptance rule value '" + value + "' is not a number");
  }
  if (kind == "epsilon" || kind == "eps") return epsilon(v);
  if (kind == "top_k") {
    if (v != std::floor(v) || v < 1) throw InputError("top_k must be a positive integer");
    return top_k(static_cast<std::size_t>(v));
  }
  if (kind == "top_p") return top_p(v);
  throw InputError("unknown acceptance rule kind '" + kind + "'");
}

std::string AcceptanceRule::to_string() const {
  std::ostringstream out;
  switch (kind_) {
    case Kind::kEpsilon: out << "epsilon=" << parameter_; break;
    case Kind::kTopK: out << "top_k=" << static_cast<std::size_t>(parameter_); break;
    case Kind::kTopP: out << "top_p=" << parameter_; break;
  }
  return out.str();
}

std::vector<bool> AcceptanceRule::accepted(const NextDist& dist) const {
  std::vector<bool> out(dist.size(), false);
  if (dist.is_terminal()) return out;
  const auto p = dist.probabilities();
  switch (kind_) {
    case Kind::kEpsilon:
      for (TokenId a = 0; a < p.size(); ++a) out[a] = p[a] > parameter_;
      break;
    case Kind::kTopK: {
      const auto order = dist.ranking();
      const auto k = static_cast<std::size_t>(parameter_);
      for (std::size_t i = 0; i < order.size() && i < k; ++i) {
        if (p[order[i]] > 0.0) out[order[i]] = true;
      }
      break;
    }
    case Kind::kTopP: {
      // Literal minimal-set construction: add tokens in rank order until the
      // accumulated mass is strictly larger than p.
      double mass = 0.0;
      for (TokenId a : dist.ranking()) {
        if (p[a] <= 0.0) break;
        out[a] = true;
        mass += p[a];
        if (mass > parameter_) break;
      }
      break;
    }
  }
  return out;
}

bool AcceptanceRule::accepts(const NextDist& dist, TokenId a) const {
  if (a >= dist.size()) throw InputError("token id outside distribution");
  if (kind_ == Kind::kEpsilon) return dist[a] > parameter_;
  return accepted(dist)[a];
}

}  // namespace worldgauge::genmodel
