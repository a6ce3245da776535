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
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "worldgauge/core/errors.hpp"

namespace worldgauge::metrics {

struct MetricReport {
  std::string metric;
  // Scores of the slots that produced a value, in slot order.
  std::vector<double> scores;
  std::size_t not_applicable = 0;  // defined as excluded (e.g. empty model boundary)
  std::size_t skipped = 0;         // sampler could not produce a usable case
  std::size_t resampled = 0;       // cases redrawn because the true boundary was empty
  std::size_t not_run = 0;         // slots left unevaluated after an abort
  std::map<std::string, std::string> params;

  // NaN when no slot produced a score.
  double mean() const;
  // Sample standard deviation over sqrt(count); 0 for fewer than two scores.
  double standard_error() const;
  std::size_t count() const noexcept { return scores.size(); }
};

// "0.93 (0.01)", or "n/a" for an empty report.
std::string format_score(const MetricReport& report, int digits = 2);

// One row of the summary table: next-token, compression precision,
// distinction precision, distinction recall. Missing columns print "-".
struct SummaryRow {
  std::string label;
  std::optional<MetricReport> next_token;
  std::optional<MetricReport> compression;
  std::optional<MetricReport> distinction_precision;
  std::optional<MetricReport> distinction_recall;
  // Judge-mode task score. Adds a column when any row carries one.
  std::optional<MetricReport> task_accuracy;
};

std::string to_markdown(const std::vector<SummaryRow>& rows);
// Columns: label,metric,mean,se,count,not_applicable,skipped,resampled.
std::string to_csv(const std::vector<SummaryRow>& rows);

// Raised when the model transport fails mid-run. Carries every score that
// was computed before the failure.
class EvaluationAborted : public Error {
 public:
  EvaluationAborted(const std::string& what, MetricReport partial)
      : Error(what), partial_(std::move(partial)) {}
  const MetricReport& partial() const noexcept { return partial_; }

 private:
  MetricReport partial_;
};

}  // namespace worldgauge::metrics
