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

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace idprice {

struct StatSummary {
  std::size_t count = 0;
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation (n-1)
  double min = 0.0;
  double p25 = 0.0;  // percentiles by linear interpolation between ranks
  double p50 = 0.0;
  double p75 = 0.0;
  double max = 0.0;
};

StatSummary stat_summary(std::span<const double> values);

// q in [0, 100] over an unsorted sample.
double percentile(std::span<const double> values, double q);

struct Histogram {
  std::vector<double> edges;    // strictly increasing, bins.size() + 1
  std::vector<double> density;  // count / (n * width) per bin
  std::size_t count = 0;        // all values, including clipped ones
  std::size_t clipped = 0;      // values outside the edges, folded into end bins
};

Histogram empirical_pdf(std::span<const double> values, std::size_t bins);
Histogram empirical_pdf(std::span<const double> values,
                        std::vector<double> edges);

// Two-sample Kolmogorov-Smirnov statistic: sup|F_a - F_b| over the pooled
// sample points.
double ks_statistic(std::span<const double> a, std::span<const double> b);

struct StatDeltas {
  double mean = 0.0;
  double stddev = 0.0;
  double min = 0.0;
  double p25 = 0.0;
  double p50 = 0.0;
  double p75 = 0.0;
  double max = 0.0;
};

struct EvalReport {
  StatSummary actual;
  StatSummary generated;
  Histogram actual_hist;     // shares edges with generated_hist
  Histogram generated_hist;
  double ks = 0.0;
  StatDeltas deltas;  // absolute differences, actual vs generated
};

// Histogram edges span the union range of both inputs so the two densities
// are directly comparable.
EvalReport compare_report(std::span<const double> actual,
                          std::span<const double> generated, std::size_t bins);

std::string eval_report_to_json(const EvalReport& report);
// bin_left,bin_right,density_actual,density_generated
std::string eval_histograms_to_csv(const EvalReport& report);

}  // namespace idprice
