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

#include "market_data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "error.hpp"

namespace idprice {

const char* to_string(FieldKind kind) {
  switch (kind) {
    case FieldKind::da:
      return "da";
    case FieldKind::high:
      return "high";
    case FieldKind::low:
      return "low";
    case FieldKind::last:
      return "last";
    case FieldKind::avg:
      return "avg";
  }
  return "?";
}

FieldKind field_kind_from_string(std::string_view name) {
  if (name == "da") return FieldKind::da;
  if (name == "high") return FieldKind::high;
  if (name == "low") return FieldKind::low;
  if (name == "last") return FieldKind::last;
  if (name == "avg") return FieldKind::avg;
  throw Error::usage("unknown price field '" + std::string(name) +
                     "' (expected da|high|low|last|avg)");
}

namespace {

bool parse_int(std::string_view text, int& out) {
  const char* begin = text.data();
  const char* end = begin + text.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && ptr == end;
}

// Howard Hinnant's days-from-civil algorithm.
std::int64_t days_from_civil(int y, int m, int d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2u) / 5u + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

int days_in_month(int year, int month) {
  static constexpr int kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  if (month == 2) {
    const bool leap = (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
    return leap ? 29 : 28;
  }
  return kDays[month - 1];
}

}  // namespace

std::optional<Date> Date::parse(std::string_view text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
  Date d;
  if (!parse_int(text.substr(0, 4), d.year) ||
      !parse_int(text.substr(5, 2), d.month) ||
      !parse_int(text.substr(8, 2), d.day)) {
    return std::nullopt;
  }
  if (!d.valid()) return std::nullopt;
  return d;
}

bool Date::valid() const {
  return year >= 1900 && year <= 9999 && month >= 1 && month <= 12 &&
         day >= 1 && day <= days_in_month(year, month);
}

std::string Date::to_string() const {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", year, month, day);
  return buf;
}

std::int64_t Date::civil_index() const {
  return days_from_civil(year, month, day);
}

Date date_from_civil(std::int64_t days) {
  days += 719468;
  const std::int64_t era = (days >= 0 ? days : days - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(days - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  const unsigned d = doy - (153 * mp + 2) / 5 + 1;
  const unsigned m = mp + (mp < 10 ? 3 : -9);
  return Date{static_cast<int>(y + (m <= 2)), static_cast<int>(m),
              static_cast<int>(d)};
}

std::optional<HourStamp> HourStamp::parse(std::string_view text) {
  // YYYY-MM-DDTHH[:MM[:SS]] with minutes/seconds required to be zero.
  if (text.size() < 13 || (text[10] != 'T' && text[10] != ' ')) {
    return std::nullopt;
  }
  const auto date = Date::parse(text.substr(0, 10));
  if (!date) return std::nullopt;
  HourStamp stamp;
  stamp.date = *date;
  if (!parse_int(text.substr(11, 2), stamp.hour)) return std::nullopt;
  std::string_view rest = text.substr(13);
  while (!rest.empty()) {
    if (rest.size() < 3 || rest[0] != ':' || rest.substr(1, 2) != "00") {
      return std::nullopt;
    }
    rest = rest.substr(3);
  }
  if (!stamp.valid()) return std::nullopt;
  return stamp;
}

bool HourStamp::valid() const { return date.valid() && hour >= 0 && hour <= 23; }

std::string HourStamp::to_string() const {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%sT%02d:00", date.to_string().c_str(), hour);
  return buf;
}

std::optional<double> PriceRecord::field(FieldKind kind) const {
  switch (kind) {
    case FieldKind::da:
      return da_price;
    case FieldKind::high:
      return id_high;
    case FieldKind::low:
      return id_low;
    case FieldKind::last:
      return id_last;
    case FieldKind::avg:
      return id_avg;
  }
  return std::nullopt;
}

MarketSeries MarketSeries::from_records(std::vector<PriceRecord> records,
                                        std::string source_label) {
  MarketSeries series;
  series.source_label_ = std::move(source_label);
  for (PriceRecord& record : records) {
    series.by_zone_[record.zone].push_back(std::move(record));
  }
  for (auto& [zone, zone_records] : series.by_zone_) {
    std::sort(zone_records.begin(), zone_records.end(),
              [](const PriceRecord& a, const PriceRecord& b) {
                return a.timestamp < b.timestamp;
              });
    for (std::size_t i = 1; i < zone_records.size(); ++i) {
      if (zone_records[i].timestamp == zone_records[i - 1].timestamp) {
        throw Error::data("duplicate record for (" + zone + ", " +
                          zone_records[i].timestamp.to_string() + ")");
      }
    }
    series.zones_.push_back(zone);
    series.record_count_ += zone_records.size();
  }
  return series;
}

bool MarketSeries::has_zone(std::string_view zone) const {
  return by_zone_.find(zone) != by_zone_.end();
}

const std::vector<PriceRecord>& MarketSeries::records(
    std::string_view zone) const {
  auto it = by_zone_.find(zone);
  if (it == by_zone_.end()) {
    throw Error::data("unknown zone '" + std::string(zone) + "'");
  }
  return it->second;
}

std::optional<std::pair<HourStamp, HourStamp>> MarketSeries::coverage() const {
  std::optional<std::pair<HourStamp, HourStamp>> out;
  for (const auto& [zone, records] : by_zone_) {
    if (records.empty()) continue;
    if (!out) {
      out = {records.front().timestamp, records.back().timestamp};
    } else {
      out->first = std::min(out->first, records.front().timestamp);
      out->second = std::max(out->second, records.back().timestamp);
    }
  }
  return out;
}

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

bool parse_optional_double(std::string_view text, std::optional<double>& out) {
  if (text.empty()) {
    out = std::nullopt;
    return true;
  }
  double value = 0.0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || !std::isfinite(value)) return false;
  out = value;
  return true;
}

// Invariant checks applied per row; returns an explanation for rejects.
std::optional<std::string> validate_record(const PriceRecord& r) {
  const auto violates = [](const std::optional<double>& lo,
                           const std::optional<double>& hi) {
    return lo && hi && *lo > *hi;
  };
  if (violates(r.id_low, r.id_high)) return "id_low > id_high";
  if (violates(r.id_low, r.id_avg)) return "id_low > id_avg";
  if (violates(r.id_avg, r.id_high)) return "id_avg > id_high";
  if (r.buy_volume && *r.buy_volume < 0.0) return "negative buy_volume";
  if (r.sell_volume && *r.sell_volume < 0.0) return "negative sell_volume";
  return std::nullopt;
}

std::string format_double(double value) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

}  // namespace

ParseResult parse_market_csv(std::string_view text, std::string source_label) {
  ParseResult result;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  std::vector<PriceRecord> records;
  bool header_seen = false;

  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    std::string_view line = (nl == std::string_view::npos)
                                ? text.substr(pos)
                                : text.substr(pos, nl - pos);
    pos = (nl == std::string_view::npos) ? text.size() + 1 : nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!header_seen) {
      if (line != kMarketCsvHeader) {
        throw Error::data("missing or malformed header; expected '" +
                          std::string(kMarketCsvHeader) + "'");
      }
      header_seen = true;
      continue;
    }
    if (line.empty()) continue;

    const auto fields = split_fields(line);
    if (fields.size() != 9) {
      result.warnings.push_back(
          {line_no, "expected 9 columns, found " + std::to_string(fields.size())});
      continue;
    }
    PriceRecord record;
    const auto stamp = HourStamp::parse(fields[0]);
    if (!stamp) {
      result.warnings.push_back(
          {line_no, "bad timestamp '" + std::string(fields[0]) + "'"});
      continue;
    }
    record.timestamp = *stamp;
    record.zone = std::string(fields[1]);
    if (record.zone.empty()) {
      result.warnings.push_back({line_no, "empty zone"});
      continue;
    }
    bool numbers_ok = parse_optional_double(fields[2], record.da_price) &&
                      parse_optional_double(fields[3], record.id_high) &&
                      parse_optional_double(fields[4], record.id_low) &&
                      parse_optional_double(fields[5], record.id_last) &&
                      parse_optional_double(fields[6], record.id_avg) &&
                      parse_optional_double(fields[7], record.buy_volume) &&
                      parse_optional_double(fields[8], record.sell_volume);
    if (!numbers_ok) {
      result.warnings.push_back({line_no, "unparseable numeric field"});
      continue;
    }
    if (const auto reason = validate_record(record)) {
      result.warnings.push_back({line_no, *reason});
      continue;
    }
    records.push_back(std::move(record));
  }
  if (!header_seen) {
    throw Error::data("missing or malformed header; expected '" +
                      std::string(kMarketCsvHeader) + "'");
  }
  result.series = MarketSeries::from_records(std::move(records),
                                             std::move(source_label));
  return result;
}

ParseResult load_market_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error::data("cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_market_csv(buffer.str(), path);
}

std::string serialize_market_csv(const MarketSeries& series) {
  std::string out(kMarketCsvHeader);
  out += '\n';
  const auto cell = [](const std::optional<double>& v) {
    return v ? format_double(*v) : std::string();
  };
  for (const std::string& zone : series.zones()) {
    for (const PriceRecord& r : series.records(zone)) {
      out += r.timestamp.to_string();
      out += ',';
      out += r.zone;
      for (const auto* field :
           {&r.da_price, &r.id_high, &r.id_low, &r.id_last, &r.id_avg,
            &r.buy_volume, &r.sell_volume}) {
        out += ',';
        out += cell(*field);
      }
      out += '\n';
    }
  }
  return out;
}

double price_variation(double high, double low, double avg) {
  if (avg == 0.0) {
    throw Error::data("price variation undefined: average price is 0");
  }
  if (high < low) {
    throw Error::data("price variation: high < low");
  }
  return (high - low) / avg * 100.0;
}

SimilarPriceResult similar_price_fraction(const MarketSeries& series,
                                          std::span<const std::string> zones,
                                          FieldKind kind, double tolerance) {
  if (zones.size() < 2) {
    throw Error::usage("similar_price_fraction needs at least 2 zones");
  }
  // Timestamps where every zone has the field, keyed by hour index.
  std::map<std::int64_t, std::pair<double, double>> range;  // (min, max)
  std::map<std::int64_t, std::size_t> seen;
  for (const std::string& zone : zones) {
    for (const PriceRecord& record : series.records(zone)) {
      const auto value = record.field(kind);
      if (!value) continue;
      const std::int64_t key = record.timestamp.hour_index();
      auto [it, inserted] = range.try_emplace(key, *value, *value);
      if (!inserted) {
        it->second.first = std::min(it->second.first, *value);
        it->second.second = std::max(it->second.second, *value);
      }
      seen[key] += 1;
    }
  }
  SimilarPriceResult result;
  for (const auto& [key, count] : seen) {
    if (count != zones.size()) continue;
    result.overlap_count += 1;
    const auto& [lo, hi] = range.at(key);
    if (hi - lo <= tolerance) result.similar_count += 1;
  }
  if (result.overlap_count == 0) {
    throw Error::data("no overlapping timestamps across requested zones");
  }
  result.percent = 100.0 * static_cast<double>(result.similar_count) /
                   static_cast<double>(result.overlap_count);
  return result;
}

double volume_share(double id_volume, double da_volume) {
  if (!(da_volume > 0.0)) {
    throw Error::data("volume share undefined: DA volume must be positive");
  }
  return 100.0 * id_volume / da_volume;
}

std::size_t DayProfile::present_count() const {
  std::size_t n = 0;
  for (const auto& v : values) {
    if (v) ++n;
  }
  return n;
}

DayProfile day_profile(const MarketSeries& series, std::string_view zone,
                       Date date, FieldKind kind) {
  const auto& records = series.records(zone);  // throws on unknown zone
  DayProfile profile;
  profile.date = date;
  profile.zone = std::string(zone);
  profile.field = kind;
  for (const PriceRecord& record : records) {
    if (record.timestamp.date != date) continue;
    profile.values[static_cast<std::size_t>(record.timestamp.hour)] =
        record.field(kind);
  }
  return profile;
}

std::vector<std::optional<double>> hourly_values(const MarketSeries& series,
                                                 std::string_view zone,
                                                 FieldKind kind,
                                                 std::optional<Date> from,
                                                 std::optional<Date> to) {
  const auto& records = series.records(zone);
  std::optional<std::int64_t> first, last;
  std::map<std::int64_t, double> present;
  for (const PriceRecord& record : records) {
    if (from && record.timestamp.date < *from) continue;
    if (to && record.timestamp.date > *to) continue;
    const std::int64_t key = record.timestamp.hour_index();
    if (!first) first = key;
    last = key;
    if (const auto value = record.field(kind)) present[key] = *value;
  }
  std::vector<std::optional<double>> slots;
  if (!first) return slots;
  slots.resize(static_cast<std::size_t>(*last - *first + 1));
  for (const auto& [key, value] : present) {
    slots[static_cast<std::size_t>(key - *first)] = value;
  }
  return slots;
}

std::vector<WindowSample> sliding_windows(
    std::span<const std::optional<double>> values, std::size_t window) {
  if (window < 1) throw Error::usage("sliding_windows: window must be >= 1");
  std::vector<WindowSample> samples;
  std::vector<double> segment;
  const auto flush = [&]() {
    if (segment.size() > window) {
      for (std::size_t i = 0; i + window < segment.size(); ++i) {
        samples.emplace_back(
            std::vector<double>(segment.begin() + i,
                                segment.begin() + i + window),
            segment[i + window]);
      }
    }
    segment.clear();
  };
  for (const auto& value : values) {
    if (value) {
      segment.push_back(*value);
    } else {
      flush();
    }
  }
  flush();
  return samples;
}

}  // namespace idprice
