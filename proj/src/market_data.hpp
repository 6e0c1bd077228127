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

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace idprice {

// Which price column of a record an operation reads.
enum class FieldKind { da, high, low, last, avg };

const char* to_string(FieldKind kind);
FieldKind field_kind_from_string(std::string_view name);

struct Date {
  int year = 0;
  int month = 0;
  int day = 0;

  static std::optional<Date> parse(std::string_view text);  // YYYY-MM-DD
  std::string to_string() const;
  bool valid() const;
  // Days since 1970-01-01 (proleptic Gregorian); gives calendar arithmetic.
  std::int64_t civil_index() const;

  auto operator<=>(const Date&) const = default;
};

// Inverse of Date::civil_index.
Date date_from_civil(std::int64_t days);

// One zone-local calendar hour exactly as published. No DST normalization:
// 23-hour days simply have a missing hour.
struct HourStamp {
  Date date;
  int hour = 0;  // 0..23

  static std::optional<HourStamp> parse(std::string_view text);
  std::string to_string() const;  // YYYY-MM-DDTHH:00
  bool valid() const;
  std::int64_t hour_index() const { return date.civil_index() * 24 + hour; }

  auto operator<=>(const HourStamp&) const = default;
};

// One zone-hour observation. Any intraday field may be missing (no trade in
// that hour); missingness is always explicit, never encoded as 0 -- genuine
// 0-valued prices occur in the data.
struct PriceRecord {
  HourStamp timestamp;
  std::string zone;
  std::optional<double> da_price;
  std::optional<double> id_high;
  std::optional<double> id_low;
  std::optional<double> id_last;
  std::optional<double> id_avg;
  std::optional<double> buy_volume;
  std::optional<double> sell_volume;

  std::optional<double> field(FieldKind kind) const;
};

// Time-ordered records grouped by zone. Immutable after construction;
// safely shareable across concurrent readers.
class MarketSeries {
 public:
  MarketSeries() = default;

  // Sorts per zone and enforces uniqueness of (zone, timestamp).
  static MarketSeries from_records(std::vector<PriceRecord> records,
                                   std::string source_label = "");

  const std::vector<std::string>& zones() const { return zones_; }
  bool has_zone(std::string_view zone) const;
  const std::vector<PriceRecord>& records(std::string_view zone) const;
  std::size_t record_count() const { return record_count_; }
  const std::string& source_label() const { return source_label_; }
  // Coverage interval over all zones; nullopt when empty.
  std::optional<std::pair<HourStamp, HourStamp>> coverage() const;

 private:
  std::vector<std::string> zones_;  // lexicographic
  std::map<std::string, std::vector<PriceRecord>, std::less<>> by_zone_;
  std::size_t record_count_ = 0;
  std::string source_label_;
};

struct ParseWarning {
  std::size_t line = 0;  // 1-based line number in the document
  std::string message;
};

struct ParseResult {
  MarketSeries series;
  std::vector<ParseWarning> warnings;
};

// Required header, exact column order. Empty string means missing; decimal
// point '.'; no thousands separators.
inline constexpr std::string_view kMarketCsvHeader =
    "timestamp,zone,da_price,id_high,id_low,id_last,id_avg,buy_volume,"
    "sell_volume";

// Parses a market CSV document. Well-formed rows become records; ill-formed
// rows are skipped and reported as warnings with their line number. A
// missing/mismatched header or a duplicate (zone, timestamp) key is an error.
ParseResult parse_market_csv(std::string_view text,
                             std::string source_label = "");
ParseResult load_market_csv(const std::string& path);
std::string serialize_market_csv(const MarketSeries& series);

// (high - low) / avg * 100, unrounded. avg must be nonzero: the data contains
// genuine 0-average hours and those must surface as errors, not infinities.
double price_variation(double high, double low, double avg);

// Published prices carry two decimals; half that resolution decides when two
// zone prices count as "the same".
inline constexpr double kPriceEqualityTolerance = 0.005;

struct SimilarPriceResult {
  double percent = 0.0;        // 100 * similar_count / overlap_count
  std::size_t similar_count = 0;  // timestamps where all zones agree
  std::size_t overlap_count = 0;  // timestamps where all zones have the field
};

// Over timestamps where every requested zone has `kind` present, the share of
// timestamps on which all zone values agree within `tolerance`. Both counts
// are reported so either base convention can be checked.
SimilarPriceResult similar_price_fraction(
    const MarketSeries& series, std::span<const std::string> zones,
    FieldKind kind, double tolerance = kPriceEqualityTolerance);

// 100 * id_volume / da_volume, unrounded. da_volume must be positive.
double volume_share(double id_volume, double da_volume);

// 24 hourly values for one zone-date; absent hours are explicitly missing.
struct DayProfile {
  Date date;
  std::string zone;
  FieldKind field = FieldKind::avg;
  std::array<std::optional<double>, 24> values;

  std::size_t present_count() const;
  bool complete() const { return present_count() == 24; }
};

DayProfile day_profile(const MarketSeries& series, std::string_view zone,
                       Date date, FieldKind kind);

// One hourly slot per calendar hour between the zone's first and last record
// (optionally clamped to [from, to] dates); hours without a value are
// explicitly missing. This is the gap-aware input to sliding_windows.
std::vector<std::optional<double>> hourly_values(
    const MarketSeries& series, std::string_view zone, FieldKind kind,
    std::optional<Date> from = std::nullopt,
    std::optional<Date> to = std::nullopt);

using WindowSample = std::pair<std::vector<double>, double>;

// All (window, next value) pairs from the gap-free segments of `values`.
// Windows never straddle a missing slot.
std::vector<WindowSample> sliding_windows(
    std::span<const std::optional<double>> values, std::size_t window);

}  // namespace idprice
