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

#include "worldgauge/metrics/report.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <iomanip>

namespace worldgauge::metrics {

double MetricReport::mean() const {
  if (scores.empty()) return std::numeric_limits<double>::quiet_NaN();
  return std::accumulate(scores.begin(), scores.end(), 0.0) /
         static_cast<double>(scores.size());
}

double MetricReport::standard_error() const {
  const std::size_t n = scores.size();
  if (n < 2) return 0.0;
  const double mu = mean();
  double ss = 0.0;
  for (double s : scores) ss += (s - mu) * (s - mu);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  return sd / std::sqrt(static_cast<double>(n));
}

std::string format_score(const MetricReport& report, int digits) {
  if (report.scores.empty()) return "n/a";
  std::ostringstream out;
  out << std::fixed << std::setprecision(digits) << report.mean() << " ("
      << report.standard_error() << ")";
  return out.str();
}

namespace {

std::string cell(const std::optional<MetricReport>& r) {
  return r ? format_score(*r) : "-";
}

void csv_line(std::ostringstream& out, const std::string& label,
              const std::optional<MetricReport>& r, const char* column) {
  if (!r) return;
  out << label << ',' << column << ',';
  if (r->scores.empty()) {
    out << ",,";
  } else {
    out << std::setprecision(17) << r->mean() << ',' << r->standard_error() << ',';
  }
  out << r->count() << ',' << r->not_applicable << ',' << r->skipped << ','
      << r->resampled << '\n';
}

}  // namespace

std::string to_markdown(const std::vector<SummaryRow>& rows) {
  bool with_task = false;
  for (const auto& row : rows) with_task = with_task || row.task_accuracy.has_value();
  std::ostringstream out;
  out << "| Model | Next-token test | Compression precision | Distinction precision "
         "| Distinction recall |";
  out << (with_task ? " Task accuracy |\n" : "\n");
  out << (with_task ? "|---|---|---|---|---|---|\n" : "|---|---|---|---|---|\n");
  for (const auto& row : rows) {
    out << "| " << row.label << " | " << cell(row.next_token) << " | "
        << cell(row.compression) << " | " << cell(row.distinction_precision) << " | "
        << cell(row.distinction_recall) << " |";
    if (with_task) out << ' ' << cell(row.task_accuracy) << " |";
    out << '\n';
  }
  return out.str();
}

std::string to_csv(const std::vector<SummaryRow>& rows) {
  std::ostringstream out;
  out << "label,metric,mean,se,count,not_applicable,skipped,resampled\n";
  for (const auto& row : rows) {
    csv_line(out, row.label, row.next_token, "next_token");
    csv_line(out, row.label, row.compression, "compression_precision");
    csv_line(out, row.label, row.distinction_precision, "distinction_precision");
    csv_line(out, row.label, row.distinction_recall, "distinction_recall");
    csv_line(out, row.label, row.task_accuracy, "task_accuracy");
  }
  return out.str();
}

}  // namespace worldgauge::metrics
