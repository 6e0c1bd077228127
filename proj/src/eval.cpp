// Copyright 2026 idprice authors
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

#include "eval.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "error.hpp"
#include "json.hpp"

namespace idprice {

namespace {

double interpolated_percentile(const std::vector<double>& sorted, double q) {
  const double rank = q / 100.0 * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(rank);
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double frac = rank - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

std::string format_double(double value) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

}  // namespace

double percentile(std::span<const double> values, double q) {
  if (values.empty()) throw Error::data("percentile of empty input");
  if (!(q >= 0.0 && q <= 100.0)) {
    throw Error::usage("percentile q outside [0, 100]");
  }
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  return interpolated_percentile(sorted, q);
}

StatSummary stat_summary(std::span<const double> values) {
  if (values.empty()) throw Error::data("stat_summary of empty input");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());

  StatSummary s;
  s.count = sorted.size();
  double sum = 0.0;
  for (double v : sorted) sum += v;
  s.mean = sum / static_cast<double>(s.count);
  double ss = 0.0;
  for (double v : sorted) ss += (v - s.mean) * (v - s.mean);
  s.stddev = s.count > 1
                 ? std::sqrt(ss / static_cast<double>(s.count - 1))
                 : 0.0;
  s.min = sorted.front();
  s.max = sorted.back();
  s.p25 = interpolated_percentile(sorted, 25.0);
  s.p50 = interpolated_percentile(sorted, 50.0);
  s.p75 = interpolated_percentile(sorted, 75.0);
  return s;
}

Histogram empirical_pdf(std::span<const double> values, std::size_t bins) {
  if (values.empty()) throw Error::data("empirical_pdf of empty input");
  if (bins < 1) throw Error::usage("empirical_pdf needs at least 1 bin");
  double lo = values[0];
  double hi = values[0];
  for (double v : values) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (lo == hi) {
    // Degenerate range: center a unit-wide span on the single value.
    lo -= 0.5;
    hi += 0.5;
  }
  std::vector<double> edges(bins + 1);
  for (std::size_t i = 0; i <= bins; ++i) {
    edges[i] = lo + (hi - lo) * static_cast<double>(i) /
                        static_cast<double>(bins);
  }
  edges.back() = hi;  // exact upper edge regardless of rounding
  return empirical_pdf(values, std::move(edges));
}

Histogram empirical_pdf(std::span<const double> values,
                        std::vector<double> edges) {
  if (values.empty()) throw Error::data("empirical_pdf of empty input");
  if (edges.size() < 2) throw Error::usage("empirical_pdf needs >= 2 edges");
  for (std::size_t i = 1; i < edges.size(); ++i) {
    if (!(edges[i] > edges[i - 1])) {
      throw Error::usage("empirical_pdf edges must be strictly increasing");
    }
  }
  const std::size_t bins = edges.size() - 1;
  std::vector<std::size_t> counts(bins, 0);
  std::size_t clipped = 0;
  for (double v : values) {
    std::size_t bin;
    if (v < edges.front()) {
      bin = 0;
      ++clipped;
    } else if (v >= edges.back()) {
      bin = bins - 1;
      if (v > edges.back()) ++clipped;
    } else {
      // Right-open bins [e_i, e_{i+1}); the last bin closes at the top edge.
      const auto it = std::upper_bound(edges.begin(), edges.end(), v);
      bin = static_cast<std::size_t>(it - edges.begin()) - 1;
    }
    counts[bin] += 1;
  }
  Histogram h;
  h.edges = std::move(edges);
  h.count = values.size();
  h.clipped = clipped;
  h.density.resize(bins);
  for (std::size_t i = 0; i < bins; ++i) {
    const double width = h.edges[i + 1] - h.edges[i];
    h.density[i] = static_cast<double>(counts[i]) /
                   (static_cast<double>(h.count) * width);
  }
  return h;
}

double ks_statistic(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) {
    throw Error::data("ks_statistic: empty sample");
  }
  std::vector<double> sa(a.begin(), a.end());
  std::vector<double> sb(b.begin(), b.end());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  const double na = static_cast<double>(sa.size());
  const double nb = static_cast<double>(sb.size());
  std::size_t ia = 0;
  std::size_t ib = 0;
  double sup = 0.0;
  while (ia < sa.size() && ib < sb.size()) {
    const double x = std::min(sa[ia], sb[ib]);
    while (ia < sa.size() && sa[ia] <= x) ++ia;
    while (ib < sb.size() && sb[ib] <= x) ++ib;
    sup = std::max(sup, std::abs(static_cast<double>(ia) / na -
                                 static_cast<double>(ib) / nb));
  }
  return sup;
}

EvalReport compare_report(std::span<const double> actual,
                          std::span<const double> generated,
                          std::size_t bins) {
  if (actual.empty() || generated.empty()) {
    throw Error::data("compare_report: empty input");
  }
  if (bins < 1) throw Error::usage("compare_report needs at least 1 bin");

  EvalReport report;
  report.actual = stat_summary(actual);
  report.generated = stat_summary(generated);

  double lo = std::min(report.actual.min, report.generated.min);
  double hi = std::max(report.actual.max, report.generated.max);
  if (lo == hi) {
    lo -= 0.5;
    hi += 0.5;
  }
  std::vector<double> edges(bins + 1);
  for (std::size_t i = 0; i <= bins; ++i) {
    edges[i] =
        lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(bins);
  }
  edges.back() = hi;
  report.actual_hist = empirical_pdf(actual, edges);
  report.generated_hist = empirical_pdf(generated, std::move(edges));
  report.ks = ks_statistic(actual, generated);

  const StatSummary& a = report.actual;
  const StatSummary& g = report.generated;
  report.deltas = {std::abs(a.mean - g.mean), std::abs(a.stddev - g.stddev),
                   std::abs(a.min - g.min),   std::abs(a.p25 - g.p25),
                   std::abs(a.p50 - g.p50),   std::abs(a.p75 - g.p75),
                   std::abs(a.max - g.max)};
  return report;
}

namespace {

nlohmann::json summary_to_json(const StatSummary& s) {
  return nlohmann::json{{"count", s.count}, {"mean", s.mean},
                        {"std", s.stddev},  {"min", s.min},
                        {"p25", s.p25},     {"p50", s.p50},
                        {"p75", s.p75},     {"max", s.max}};
}

}  // namespace

std::string eval_report_to_json(const EvalReport& report) {
  nlohmann::json j;
  j["actual"] = summary_to_json(report.actual);
  j["generated"] = summary_to_json(report.generated);
  j["ks"] = report.ks;
  j["deltas"] = {{"mean", report.deltas.mean}, {"std", report.deltas.stddev},
                 {"min", report.deltas.min},   {"p25", report.deltas.p25},
                 {"p50", report.deltas.p50},   {"p75", report.deltas.p75},
                 {"max", report.deltas.max}};
  j["histogram"] = {{"edges", report.actual_hist.edges},
                    {"density_actual", report.actual_hist.density},
                    {"density_generated", report.generated_hist.density},
                    {"clipped_actual", report.actual_hist.clipped},
                    {"clipped_generated", report.generated_hist.clipped}};
  return j.dump(2);
}

std::string eval_histograms_to_csv(const EvalReport& report) {
  std::string out = "bin_left,bin_right,density_actual,density_generated\n";
  const auto& edges = report.actual_hist.edges;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    out += format_double(edges[i]) + "," + format_double(edges[i + 1]) + "," +
           format_double(report.actual_hist.density[i]) + "," +
           format_double(report.generated_hist.density[i]) + "\n";
  }
  return out;
}

}  // namespace idprice
