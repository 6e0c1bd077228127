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

#include "commands.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <vector>

#include "checkpoint.hpp"
#include "dcgan.hpp"
#include "error.hpp"
#include "eval.hpp"
#include "lstm.hpp"
#include "market_data.hpp"
#include "nuts.hpp"
#include "numerics.hpp"

namespace idprice {

namespace {

const std::set<std::string>& known_options() {
  static const std::set<std::string> keys = {
      "input",      "da-input", "zone",    "field",    "model",
      "train-range", "test-range", "epochs", "hidden",  "window",
      "lr",         "latent",   "batch",   "arch",     "components",
      "warmup",     "samples",  "target-accept", "hour", "bins",
      "seed",       "out",      "checkpoint", "count",  "date",
      "one-step",   "actual",   "generated"};
  return keys;
}

std::optional<std::string> get(const Options& options, const std::string& key) {
  const auto it = options.find(key);
  if (it == options.end()) return std::nullopt;
  return it->second;
}

std::string require(const Options& options, const std::string& key) {
  const auto value = get(options, key);
  if (!value || value->empty()) {
    throw Error::usage("missing required option --" + key);
  }
  return *value;
}

std::size_t get_size(const Options& options, const std::string& key,
                     std::size_t fallback) {
  const auto value = get(options, key);
  if (!value) return fallback;
  std::size_t out = 0;
  const char* begin = value->c_str();
  auto [ptr, ec] = std::from_chars(begin, begin + value->size(), out);
  if (ec != std::errc() || ptr != begin + value->size()) {
    throw Error::usage("option --" + key + " must be a non-negative integer");
  }
  return out;
}

double get_double(const Options& options, const std::string& key,
                  double fallback) {
  const auto value = get(options, key);
  if (!value) return fallback;
  double out = 0.0;
  const char* begin = value->c_str();
  auto [ptr, ec] = std::from_chars(begin, begin + value->size(), out);
  if (ec != std::errc() || ptr != begin + value->size()) {
    throw Error::usage("option --" + key + " must be a number");
  }
  return out;
}

bool get_flag(const Options& options, const std::string& key) {
  const auto value = get(options, key);
  if (!value) return false;
  if (*value == "1" || *value == "true") return true;
  if (*value == "0" || *value == "false") return false;
  throw Error::usage("option --" + key + " must be true/false");
}

bool ci_mode() {
  const char* env = std::getenv("IDPRICE_CI");
  return env != nullptr && std::string(env) == "1";
}

std::uint64_t resolve_seed(const Options& options) {
  if (const auto value = get(options, "seed")) {
    std::uint64_t out = 0;
    const char* begin = value->c_str();
    auto [ptr, ec] = std::from_chars(begin, begin + value->size(), out);
    if (ec != std::errc() || ptr != begin + value->size()) {
      throw Error::usage("option --seed must be a non-negative integer");
    }
    return out;
  }
  if (ci_mode()) {
    throw Error::usage("randomized commands require --seed when IDPRICE_CI=1");
  }
  return SeededRng::from_entropy().seed();
}

struct DateRange {
  Date from;
  Date to;
};

DateRange parse_range(const std::string& text, const std::string& key) {
  const std::size_t colon = text.find(':');
  if (colon == std::string::npos) {
    throw Error::usage("option --" + key +
                       " must look like YYYY-MM-DD:YYYY-MM-DD");
  }
  const auto from = Date::parse(text.substr(0, colon));
  const auto to = Date::parse(text.substr(colon + 1));
  if (!from || !to || *to < *from) {
    throw Error::usage("option --" + key + " is not a valid date range");
  }
  return {*from, *to};
}

std::optional<DateRange> get_range(const Options& options,
                                   const std::string& key) {
  const auto value = get(options, key);
  if (!value) return std::nullopt;
  return parse_range(*value, key);
}

void require_disjoint(const std::optional<DateRange>& train,
                      const std::optional<DateRange>& test) {
  if (!train || !test) return;
  const bool disjoint = train->to < test->from || test->to < train->from;
  if (!disjoint) {
    throw Error::usage("--train-range and --test-range must be disjoint");
  }
}

std::filesystem::path prepare_out_dir(const Options& options) {
  const std::string out = require(options, "out");
  std::error_code ec;
  std::filesystem::create_directories(out, ec);
  if (ec) throw Error::data("cannot create output directory '" + out + "'");
  return out;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error::data("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw Error::data("failed writing '" + path.string() + "'");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error::data("cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::string format_double(double value) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

std::string format_fixed(double value, int decimals) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, value);
  return buf;
}

MarketSeries load_series(const Options& options, const std::string& key) {
  return load_market_csv(require(options, key)).series;
}

std::string resolve_zone(const MarketSeries& series, const Options& options) {
  if (const auto zone = get(options, "zone")) {
    if (!series.has_zone(*zone)) {
      throw Error::data("no data for zone '" + *zone + "'");
    }
    return *zone;
  }
  if (series.zones().size() == 1) return series.zones().front();
  throw Error::usage("input has multiple zones; pick one with --zone");
}

FieldKind resolve_field(const Options& options) {
  return field_kind_from_string(get(options, "field").value_or("avg"));
}

MarketSeries filter_series(const MarketSeries& series,
                           const std::optional<DateRange>& range,
                           const std::optional<std::string>& zone) {
  std::vector<PriceRecord> kept;
  for (const std::string& z : series.zones()) {
    if (zone && z != *zone) continue;
    for (const PriceRecord& record : series.records(z)) {
      if (range && (record.timestamp.date < range->from ||
                    record.timestamp.date > range->to)) {
        continue;
      }
      kept.push_back(record);
    }
  }
  return MarketSeries::from_records(std::move(kept), series.source_label());
}

// ---------------------------------------------------------------------------
// explore

void write_variation_csv(const MarketSeries& series,
                         const std::filesystem::path& path) {
  std::string out = "timestamp,zone,high,low,avg,spread,variation_pct\n";
  for (const std::string& zone : series.zones()) {
    for (const PriceRecord& r : series.records(zone)) {
      if (!r.id_high || !r.id_low || !r.id_avg) continue;
      out += r.timestamp.to_string() + "," + zone + "," +
             format_double(*r.id_high) + "," + format_double(*r.id_low) + "," +
             format_double(*r.id_avg) + "," +
             format_fixed(*r.id_high - *r.id_low, 2) + ",";
      if (*r.id_avg != 0.0) {
        out += format_fixed(price_variation(*r.id_high, *r.id_low, *r.id_avg), 2);
      }
      out += "\n";
    }
  }
  write_file(path, out);
}

void write_similar_prices_csv(const MarketSeries& series,
                              const std::filesystem::path& path) {
  std::string out = "year,field,percent,similar_count,overlap_count\n";
  std::set<int> years;
  for (const std::string& zone : series.zones()) {
    for (const PriceRecord& r : series.records(zone)) {
      years.insert(r.timestamp.date.year);
    }
  }
  for (const int year : years) {
    std::vector<PriceRecord> in_year;
    for (const std::string& zone : series.zones()) {
      for (const PriceRecord& r : series.records(zone)) {
        if (r.timestamp.date.year == year) in_year.push_back(r);
      }
    }
    const MarketSeries year_series = MarketSeries::from_records(in_year);
    if (year_series.zones().size() < 2) continue;
    for (const FieldKind field :
         {FieldKind::da, FieldKind::high, FieldKind::low, FieldKind::last,
          FieldKind::avg}) {
      try {
        const SimilarPriceResult result = similar_price_fraction(
            year_series, year_series.zones(), field);
        out += std::to_string(year) + std::string(",") + to_string(field) +
               "," + format_fixed(result.percent, 2) + "," +
               std::to_string(result.similar_count) + "," +
               std::to_string(result.overlap_count) + "\n";
      } catch (const Error&) {
        // No overlapping hours for this year/field; nothing to report.
      }
    }
  }
  write_file(path, out);
}

void write_volume_share_csv(const MarketSeries& id_series,
                            const MarketSeries* da_series,
                            const std::filesystem::path& path) {
  std::string out = "zone,type,da_volume,id_volume,share_pct\n";
  for (const std::string& zone : id_series.zones()) {
    double id_buy = 0.0, id_sell = 0.0;
    for (const PriceRecord& r : id_series.records(zone)) {
      if (r.buy_volume) id_buy += *r.buy_volume;
      if (r.sell_volume) id_sell += *r.sell_volume;
    }
    std::optional<double> da_buy, da_sell;
    if (da_series && da_series->has_zone(zone)) {
      double buy = 0.0, sell = 0.0;
      for (const PriceRecord& r : da_series->records(zone)) {
        if (r.buy_volume) buy += *r.buy_volume;
        if (r.sell_volume) sell += *r.sell_volume;
      }
      da_buy = buy;
      da_sell = sell;
    }
    const auto row = [&](const char* type, std::optional<double> da,
                         double id) {
      out += zone + "," + type + ",";
      if (da) out += format_double(*da);
      out += "," + format_double(id) + ",";
      if (da && *da > 0.0) out += format_fixed(volume_share(id, *da), 1);
      out += "\n";
    };
    row("buy", da_buy, id_buy);
    row("sell", da_sell, id_sell);
  }
  write_file(path, out);
}

std::vector<double> field_values(const MarketSeries& series, FieldKind field,
                                 const std::optional<std::string>& zone) {
  std::vector<double> values;
  for (const std::string& z : series.zones()) {
    if (zone && z != *zone) continue;
    for (const PriceRecord& r : series.records(z)) {
      if (const auto v = r.field(field)) values.push_back(*v);
    }
  }
  return values;
}

}  // namespace

bool is_known_option(const std::string& key) {
  return known_options().count(key) > 0;
}

Options load_config_file(const std::string& path) {
  const std::string text = read_file(path);
  Options options;
  std::istringstream lines(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(lines, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error::usage(path + ":" + std::to_string(line_no) +
                         ": expected key = value");
    }
    const auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      if (b == std::string::npos) return std::string();
      return s.substr(b, e - b + 1);
    };
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
      value = value.substr(1, value.size() - 2);
    }
    if (!is_known_option(key)) {
      throw Error::usage(path + ":" + std::to_string(line_no) +
                         ": unknown option '" + key + "'");
    }
    options[key] = value;
  }
  return options;
}

Options merge_options(Options base, const Options& overrides) {
  for (const auto& [key, value] : overrides) base[key] = value;
  return base;
}

void cmd_explore(const Options& options) {
  const MarketSeries full = load_series(options, "input");
  std::optional<std::string> zone = get(options, "zone");
  if (zone && !full.has_zone(*zone)) {
    throw Error::data("no data for zone '" + *zone + "'");
  }
  const FieldKind field = resolve_field(options);
  const std::size_t bins = get_size(options, "bins", 50);
  const auto out_dir = prepare_out_dir(options);

  const MarketSeries series = filter_series(full, std::nullopt, zone);

  write_variation_csv(series, out_dir / "variation.csv");
  write_similar_prices_csv(series, out_dir / "similar_prices.csv");

  std::optional<MarketSeries> da_series;
  if (get(options, "da-input")) {
    da_series = load_series(options, "da-input");
  }
  write_volume_share_csv(series, da_series ? &*da_series : nullptr,
                         out_dir / "volume_share.csv");

  const std::vector<double> values = field_values(series, field, std::nullopt);
  std::string hist_csv = "bin_left,bin_right,density\n";
  if (!values.empty()) {
    const Histogram hist = empirical_pdf(values, bins);
    for (std::size_t i = 0; i + 1 < hist.edges.size(); ++i) {
      hist_csv += format_double(hist.edges[i]) + "," +
                  format_double(hist.edges[i + 1]) + "," +
                  format_double(hist.density[i]) + "\n";
    }
  }
  write_file(out_dir / "histograms.csv", hist_csv);
}

namespace {

// ---------------------------------------------------------------------------
// train

struct TrainContext {
  MarketSeries series;
  std::string zone;
  FieldKind field;
  std::optional<DateRange> train_range;
  std::optional<DateRange> test_range;
  std::uint64_t seed;
};

// Option parsing that can fail on user input happens before this; loading
// the series is the first expensive step.
TrainContext make_train_context(const Options& options, std::uint64_t seed) {
  TrainContext ctx{load_series(options, "input"),
                   "",
                   resolve_field(options),
                   get_range(options, "train-range"),
                   get_range(options, "test-range"),
                   seed};
  ctx.zone = resolve_zone(ctx.series, options);
  return ctx;
}

std::vector<std::optional<double>> range_slots(const TrainContext& ctx,
                                               const std::optional<DateRange>& range) {
  return hourly_values(ctx.series, ctx.zone, ctx.field,
                       range ? std::optional<Date>(range->from) : std::nullopt,
                       range ? std::optional<Date>(range->to) : std::nullopt);
}

std::vector<double> present_values(
    const std::vector<std::optional<double>>& slots) {
  std::vector<double> out;
  for (const auto& slot : slots) {
    if (slot) out.push_back(*slot);
  }
  return out;
}

std::vector<std::optional<double>> scale_slots(
    const std::vector<std::optional<double>>& slots,
    const MinMaxScaler& scaler) {
  std::vector<std::optional<double>> out(slots.size());
  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (slots[i]) out[i] = scaler.scale(*slots[i]);
  }
  return out;
}

ScalerInfo scaler_info(const MinMaxScaler& scaler) {
  return {scaler.value_min(), scaler.value_max(), scaler.target_lo(),
          scaler.target_hi()};
}

MinMaxScaler scaler_from_info(const ScalerInfo& info) {
  return MinMaxScaler::from_bounds(info.value_min, info.value_max,
                                   info.target_lo, info.target_hi);
}

void train_lstm_command(const Options& options) {
  LstmHyper hyper;
  hyper.hidden_dim = get_size(options, "hidden", hyper.hidden_dim);
  hyper.window = get_size(options, "window", hyper.window);
  hyper.epochs = get_size(options, "epochs", hyper.epochs);
  hyper.learning_rate = get_double(options, "lr", hyper.learning_rate);
  hyper.validate();
  hyper.seed = resolve_seed(options);
  const auto out_dir = prepare_out_dir(options);
  const TrainContext ctx = make_train_context(options, hyper.seed);

  const auto train_slots = range_slots(ctx, ctx.train_range);
  const std::vector<double> train_values = present_values(train_slots);
  if (train_values.empty()) {
    throw Error::data("train range contains no values after filtering");
  }
  const MinMaxScaler scaler = MinMaxScaler::fit(train_values);
  const auto train_pairs = sliding_windows(scale_slots(train_slots, scaler),
                                           hyper.window);
  if (train_pairs.empty()) {
    throw Error::data("train range is too short for window " +
                      std::to_string(hyper.window));
  }
  std::vector<WindowSample> test_pairs;
  if (ctx.test_range) {
    test_pairs = sliding_windows(
        scale_slots(range_slots(ctx, ctx.test_range), scaler), hyper.window);
  }

  const LstmTrainResult result = train_lstm(train_pairs, test_pairs, hyper);

  std::string history = "epoch,train_mse,test_mse\n";
  for (std::size_t e = 0; e < result.train_mse.size(); ++e) {
    history += std::to_string(e + 1) + "," + format_double(result.train_mse[e]) +
               ",";
    if (e < result.test_mse.size()) history += format_double(result.test_mse[e]);
    history += "\n";
  }
  write_file(out_dir / "history.csv", history);

  Checkpoint checkpoint;
  checkpoint.kind = "lstm";
  checkpoint.seed = ctx.seed;
  checkpoint.hyper = {{"hidden", std::to_string(hyper.hidden_dim)},
                      {"window", std::to_string(hyper.window)},
                      {"epochs", std::to_string(hyper.epochs)},
                      {"learning_rate", double_to_hex(hyper.learning_rate)},
                      {"clip_norm", double_to_hex(hyper.clip_norm)},
                      {"zone", ctx.zone},
                      {"field", to_string(ctx.field)}};
  checkpoint.arrays.push_back(
      {"params", {result.params.param_count()}, result.params.flatten()});
  checkpoint.scaler = scaler_info(scaler);
  checkpoint.data_fingerprint = fingerprint_doubles(train_values);
  save_checkpoint((out_dir / "checkpoint.json").string(), checkpoint);
}

GanHyper gan_hyper_from_options(const Options& options) {
  GanHyper hyper;
  hyper.latent_dim = get_size(options, "latent", hyper.latent_dim);
  hyper.epochs = get_size(options, "epochs", hyper.epochs);
  hyper.batch_size = get_size(options, "batch", hyper.batch_size);
  hyper.lr_generator = get_double(options, "lr", hyper.lr_generator);
  hyper.lr_discriminator = get_double(options, "lr", hyper.lr_discriminator);
  const std::string arch = get(options, "arch").value_or("conv");
  if (arch == "dense") {
    hyper.dense_arch = true;
  } else if (arch != "conv") {
    throw Error::usage("option --arch must be conv or dense");
  }
  return hyper;
}

void train_dcgan_command(const Options& options) {
  GanHyper hyper = gan_hyper_from_options(options);
  hyper.validate();
  hyper.seed = resolve_seed(options);
  const auto out_dir = prepare_out_dir(options);
  const TrainContext ctx = make_train_context(options, hyper.seed);

  // Complete 24-hour profiles only; partial days would need imputation.
  std::vector<std::vector<double>> profiles;
  std::set<Date> dates;
  for (const PriceRecord& r : ctx.series.records(ctx.zone)) {
    if (ctx.train_range && (r.timestamp.date < ctx.train_range->from ||
                            r.timestamp.date > ctx.train_range->to)) {
      continue;
    }
    dates.insert(r.timestamp.date);
  }
  std::vector<double> all_values;
  for (const Date& date : dates) {
    const DayProfile profile = day_profile(ctx.series, ctx.zone, date,
                                           ctx.field);
    if (!profile.complete()) continue;
    std::vector<double> values(24);
    for (std::size_t h = 0; h < 24; ++h) values[h] = *profile.values[h];
    all_values.insert(all_values.end(), values.begin(), values.end());
    profiles.push_back(std::move(values));
  }
  if (profiles.empty()) {
    throw Error::data("no complete 24-hour profiles in the train range");
  }
  const MinMaxScaler scaler = MinMaxScaler::fit(all_values);
  for (auto& profile : profiles) {
    for (double& v : profile) v = scaler.scale(v);
  }

  const GanTrainResult result = train_dcgan(profiles, hyper);

  std::string history = "epoch,gan_value\n";
  for (std::size_t e = 0; e < result.value_history.size(); ++e) {
    history += std::to_string(e + 1) + "," +
               format_double(result.value_history[e]) + "\n";
  }
  write_file(out_dir / "history.csv", history);

  Checkpoint checkpoint;
  checkpoint.kind = "dcgan";
  checkpoint.seed = ctx.seed;
  checkpoint.hyper = {{"latent", std::to_string(hyper.latent_dim)},
                      {"epochs", std::to_string(hyper.epochs)},
                      {"batch", std::to_string(hyper.batch_size)},
                      {"arch", hyper.dense_arch ? "dense" : "conv"},
                      {"lr_generator", double_to_hex(hyper.lr_generator)},
                      {"lr_discriminator", double_to_hex(hyper.lr_discriminator)},
                      {"zone", ctx.zone},
                      {"field", to_string(ctx.field)}};
  checkpoint.arrays.push_back({"generator",
                               {result.generator.param_count()},
                               result.generator.params()});
  checkpoint.arrays.push_back({"discriminator",
                               {result.discriminator.param_count()},
                               result.discriminator.params()});
  checkpoint.scaler = scaler_info(scaler);
  checkpoint.data_fingerprint = fingerprint_doubles(all_values);
  save_checkpoint((out_dir / "checkpoint.json").string(), checkpoint);
}

std::string nuts_samples_csv(const PosteriorSamples& samples) {
  const auto k = static_cast<std::size_t>(samples.components);
  std::string out;
  for (std::size_t j = 1; j <= k; ++j) out += "mean_" + std::to_string(j) + ",";
  for (std::size_t j = 1; j <= k; ++j) out += "sigma_" + std::to_string(j) + ",";
  for (std::size_t j = 1; j <= k; ++j) out += "weight_" + std::to_string(j) + ",";
  out += "tree_depth,divergent,step_size,accept_stat\n";
  for (std::size_t i = 0; i < samples.draws.size(); ++i) {
    for (const double v : samples.draws[i]) out += format_double(v) + ",";
    const DrawDiagnostics& d = samples.diagnostics[i];
    out += std::to_string(d.tree_depth) + "," + (d.divergent ? "1" : "0") +
           "," + format_double(d.step_size) + "," +
           format_double(d.accept_stat) + "\n";
  }
  return out;
}

void train_nuts_command(const Options& options) {
  NutsConfig config;
  config.warmup = get_size(options, "warmup", config.warmup);
  config.samples = get_size(options, "samples", config.samples);
  config.target_accept = get_double(options, "target-accept",
                                    config.target_accept);
  config.validate();
  const int components =
      static_cast<int>(get_size(options, "components", 2));
  if (components < 1 || components > 5) {
    throw Error::usage("option --components must be in 1..5");
  }
  config.seed = resolve_seed(options);
  const auto out_dir = prepare_out_dir(options);
  const TrainContext ctx = make_train_context(options, config.seed);

  std::vector<std::optional<double>> slots = range_slots(ctx, ctx.train_range);
  std::vector<double> values;
  const auto hour_filter = get(options, "hour");
  if (hour_filter) {
    const std::size_t hour = get_size(options, "hour", 0);
    if (hour > 23) throw Error::usage("option --hour must be in 0..23");
    for (const PriceRecord& r : ctx.series.records(ctx.zone)) {
      if (ctx.train_range && (r.timestamp.date < ctx.train_range->from ||
                              r.timestamp.date > ctx.train_range->to)) {
        continue;
      }
      if (static_cast<std::size_t>(r.timestamp.hour) != hour) continue;
      if (const auto v = r.field(ctx.field)) values.push_back(*v);
    }
  } else {
    values = present_values(slots);
  }
  if (values.empty()) {
    throw Error::data("train range contains no values after filtering");
  }

  const MixtureModel model = MixtureModel::for_data(components, values);
  const PosteriorSamples samples = nuts_sample(model, values, config);

  write_file(out_dir / "history.csv", nuts_samples_csv(samples));

  Checkpoint checkpoint;
  checkpoint.kind = "nuts";
  checkpoint.seed = ctx.seed;
  checkpoint.hyper = {{"components", std::to_string(components)},
                      {"warmup", std::to_string(config.warmup)},
                      {"samples", std::to_string(config.samples)},
                      {"target_accept", double_to_hex(config.target_accept)},
                      {"prior_mean_loc", double_to_hex(model.prior_mean_loc)},
                      {"prior_mean_scale", double_to_hex(model.prior_mean_scale)},
                      {"prior_sigma_scale", double_to_hex(model.prior_sigma_scale)},
                      {"step_size", double_to_hex(samples.adapted_step_size)},
                      {"zone", ctx.zone},
                      {"field", to_string(ctx.field)}};
  std::vector<double> flat;
  flat.reserve(samples.draws.size() * model.dim());
  for (const auto& row : samples.draws) {
    flat.insert(flat.end(), row.begin(), row.end());
  }
  checkpoint.arrays.push_back(
      {"samples", {samples.draws.size(), model.dim()}, std::move(flat)});
  std::vector<double> depth, divergent, step, accept;
  for (const DrawDiagnostics& d : samples.diagnostics) {
    depth.push_back(d.tree_depth);
    divergent.push_back(d.divergent ? 1.0 : 0.0);
    step.push_back(d.step_size);
    accept.push_back(d.accept_stat);
  }
  checkpoint.arrays.push_back({"tree_depth", {depth.size()}, depth});
  checkpoint.arrays.push_back({"divergent", {divergent.size()}, divergent});
  checkpoint.arrays.push_back({"step_size", {step.size()}, step});
  checkpoint.arrays.push_back({"accept_stat", {accept.size()}, accept});
  checkpoint.data_fingerprint = fingerprint_doubles(values);
  save_checkpoint((out_dir / "checkpoint.json").string(), checkpoint);
}

std::size_t hyper_size(const Checkpoint& checkpoint, const std::string& key) {
  const auto it = checkpoint.hyper.find(key);
  if (it == checkpoint.hyper.end()) {
    throw Error::data("checkpoint: missing hyper '" + key + "'");
  }
  std::size_t out = 0;
  const char* begin = it->second.c_str();
  auto [ptr, ec] = std::from_chars(begin, begin + it->second.size(), out);
  if (ec != std::errc() || ptr != begin + it->second.size()) {
    throw Error::data("checkpoint: hyper '" + key + "' is not an integer");
  }
  return out;
}

std::string hyper_string(const Checkpoint& checkpoint, const std::string& key) {
  const auto it = checkpoint.hyper.find(key);
  if (it == checkpoint.hyper.end()) {
    throw Error::data("checkpoint: missing hyper '" + key + "'");
  }
  return it->second;
}

// ---------------------------------------------------------------------------
// generate

void generate_lstm(const Options& options, const Checkpoint& checkpoint,
                   const std::filesystem::path& out_dir) {
  if (get(options, "count")) {
    throw Error::usage("lstm checkpoints generate by --date, not --count");
  }
  const auto date = Date::parse(require(options, "date"));
  if (!date) throw Error::usage("option --date must be YYYY-MM-DD");

  const std::size_t hidden = hyper_size(checkpoint, "hidden");
  const std::size_t window = hyper_size(checkpoint, "window");
  LstmParams params = LstmParams::zeros(1, hidden);
  params.assign_from_flat(checkpoint.array("params").data);
  if (!checkpoint.scaler) throw Error::data("lstm checkpoint has no scaler");
  const MinMaxScaler scaler = scaler_from_info(*checkpoint.scaler);

  const MarketSeries series = load_series(options, "input");
  const std::string zone =
      get(options, "zone").value_or(hyper_string(checkpoint, "zone"));
  if (!series.has_zone(zone)) {
    throw Error::data("no data for zone '" + zone + "'");
  }
  const FieldKind field = field_kind_from_string(
      get(options, "field").value_or(hyper_string(checkpoint, "field")));

  // Seed window: the last `window` hours strictly before the requested day.
  const Date day_before = date_from_civil(date->civil_index() - 1);
  const auto slots = hourly_values(series, zone, field, std::nullopt,
                                   day_before);
  if (slots.size() < window) {
    throw Error::data("not enough history before " + date->to_string());
  }
  std::vector<double> seed_window;
  seed_window.reserve(window);
  for (std::size_t i = slots.size() - window; i < slots.size(); ++i) {
    if (!slots[i]) {
      throw Error::data("history gap inside the seed window before " +
                        date->to_string());
    }
    seed_window.push_back(*slots[i]);
  }

  std::vector<double> prices;
  if (get_flag(options, "one-step")) {
    const DayProfile actual = day_profile(series, zone, *date, field);
    if (!actual.complete()) {
      throw Error::data("one-step mode needs all 24 actual hours on " +
                        date->to_string());
    }
    std::vector<double> day(24);
    for (std::size_t h = 0; h < 24; ++h) day[h] = *actual.values[h];
    prices = lstm_predict_day_one_step(params, scaler, seed_window, day);
  } else {
    prices = lstm_generate(params, scaler, seed_window, 24);
  }

  std::string csv = "date,hour,price\n";
  for (std::size_t h = 0; h < 24; ++h) {
    csv += date->to_string() + "," + std::to_string(h) + "," +
           format_double(prices[h]) + "\n";
  }
  write_file(out_dir / "scenarios.csv", csv);
}

void generate_dcgan(const Options& options, const Checkpoint& checkpoint,
                    const std::filesystem::path& out_dir) {
  if (get(options, "date")) {
    throw Error::usage("dcgan checkpoints generate by --count, not --date");
  }
  const std::size_t count = get_size(options, "count", 0);
  if (!get(options, "count")) {
    throw Error::usage("missing required option --count");
  }

  GanHyper hyper;
  hyper.latent_dim = hyper_size(checkpoint, "latent");
  hyper.dense_arch = hyper_string(checkpoint, "arch") == "dense";
  Net generator = make_generator(hyper);
  const auto& params = checkpoint.array("generator").data;
  if (params.size() != generator.param_count()) {
    throw Error::data("dcgan checkpoint: generator size mismatch");
  }
  generator.params() = params;
  if (!checkpoint.scaler) throw Error::data("dcgan checkpoint has no scaler");
  const MinMaxScaler scaler = scaler_from_info(*checkpoint.scaler);

  SeededRng rng(resolve_seed(options));
  const auto scenarios = sample_prices(generator, scaler, count, rng);

  std::string csv = "h00";
  for (int h = 1; h < 24; ++h) {
    char buf[8];
    std::snprintf(buf, sizeof(buf), ",h%02d", h);
    csv += buf;
  }
  csv += "\n";
  for (const auto& scenario : scenarios) {
    for (std::size_t h = 0; h < scenario.size(); ++h) {
      if (h > 0) csv += ",";
      csv += format_double(scenario[h]);
    }
    csv += "\n";
  }
  write_file(out_dir / "scenarios.csv", csv);
}

void generate_nuts(const Options& options, const Checkpoint& checkpoint,
                   const std::filesystem::path& out_dir) {
  if (get(options, "date")) {
    throw Error::usage("nuts checkpoints generate by --count, not --date");
  }
  if (!get(options, "count")) {
    throw Error::usage("missing required option --count");
  }
  const std::size_t count = get_size(options, "count", 0);

  PosteriorSamples samples;
  samples.components = static_cast<int>(hyper_size(checkpoint, "components"));
  const Checkpoint::Array& array = checkpoint.array("samples");
  if (array.shape.size() != 2 ||
      array.shape[1] != static_cast<std::size_t>(3 * samples.components)) {
    throw Error::data("nuts checkpoint: samples array has wrong shape");
  }
  samples.draws.reserve(array.shape[0]);
  for (std::size_t i = 0; i < array.shape[0]; ++i) {
    samples.draws.emplace_back(
        array.data.begin() + static_cast<std::ptrdiff_t>(i * array.shape[1]),
        array.data.begin() +
            static_cast<std::ptrdiff_t>((i + 1) * array.shape[1]));
  }

  const std::vector<double> draws =
      posterior_predictive(samples, count, resolve_seed(options));
  std::string csv = "price\n";
  for (const double v : draws) csv += format_double(v) + "\n";
  write_file(out_dir / "scenarios.csv", csv);
}

// ---------------------------------------------------------------------------
// evaluate

std::vector<double> load_values_csv(const std::string& path,
                                    const Options& options) {
  const std::string text = read_file(path);
  const std::size_t nl = text.find('\n');
  std::string header = text.substr(0, nl == std::string::npos ? text.size() : nl);
  if (!header.empty() && header.back() == '\r') header.pop_back();

  if (header == kMarketCsvHeader) {
    const ParseResult parsed = parse_market_csv(text, path);
    const FieldKind field = resolve_field(options);
    const auto zone = get(options, "zone");
    if (zone && !parsed.series.has_zone(*zone)) {
      throw Error::data(path + ": no data for zone '" + *zone + "'");
    }
    const std::vector<double> values = field_values(
        parsed.series, field, zone ? std::optional<std::string>(*zone)
                                   : std::nullopt);
    if (values.empty()) throw Error::data(path + ": no values for field");
    return values;
  }

  // Plain value files: a single `price` column, an h00..h23 scenario matrix
  // (pooled), or a date,hour,price profile.
  std::size_t column = 0;
  std::size_t columns = 1;
  if (header == "price") {
    column = 0;
    columns = 1;
  } else if (header.rfind("h00,", 0) == 0) {
    columns = 24;
  } else if (header == "date,hour,price") {
    column = 2;
    columns = 3;
  } else {
    throw Error::data(path + ": unrecognized CSV header '" + header + "'");
  }

  std::vector<double> values;
  std::istringstream lines(text);
  std::string line;
  std::getline(lines, line);  // header
  std::size_t line_no = 1;
  while (std::getline(lines, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream cells(line);
    std::string cell;
    std::size_t index = 0;
    while (std::getline(cells, cell, ',')) {
      const bool wanted = columns == 24 || index == column;
      if (wanted) {
        double value = 0.0;
        const char* begin = cell.c_str();
        auto [ptr, ec] = std::from_chars(begin, begin + cell.size(), value);
        if (ec != std::errc() || ptr != begin + cell.size()) {
          throw Error::data(path + ":" + std::to_string(line_no) +
                            ": bad number '" + cell + "'");
        }
        values.push_back(value);
      }
      ++index;
    }
  }
  if (values.empty()) throw Error::data(path + ": no values");
  return values;
}

}  // namespace

void cmd_train(const Options& options) {
  const std::string model = require(options, "model");
  if (model != "lstm" && model != "dcgan" && model != "nuts") {
    throw Error::usage("unknown model '" + model +
                       "' (expected lstm|dcgan|nuts)");
  }
  // Cheap argument validation comes before any filesystem work.
  require_disjoint(get_range(options, "train-range"),
                   get_range(options, "test-range"));
  if (model == "lstm") {
    train_lstm_command(options);
  } else if (model == "dcgan") {
    train_dcgan_command(options);
  } else {
    train_nuts_command(options);
  }
}

void cmd_generate(const Options& options) {
  const Checkpoint checkpoint = load_checkpoint(require(options, "checkpoint"));
  const auto out_dir = prepare_out_dir(options);
  if (checkpoint.kind == "lstm") {
    generate_lstm(options, checkpoint, out_dir);
  } else if (checkpoint.kind == "dcgan") {
    generate_dcgan(options, checkpoint, out_dir);
  } else if (checkpoint.kind == "nuts") {
    generate_nuts(options, checkpoint, out_dir);
  } else {
    throw Error::data("checkpoint kind '" + checkpoint.kind +
                      "' does not support generation");
  }
}

void cmd_evaluate(const Options& options) {
  const std::string actual_path = require(options, "actual");
  const std::string generated_path = require(options, "generated");
  const std::size_t bins = get_size(options, "bins", 50);
  const auto out_dir = prepare_out_dir(options);

  const std::vector<double> actual = load_values_csv(actual_path, options);
  const std::vector<double> generated = load_values_csv(generated_path, options);

  const EvalReport report = compare_report(actual, generated, bins);
  write_file(out_dir / "report.json", eval_report_to_json(report) + "\n");
  write_file(out_dir / "histograms.csv", eval_histograms_to_csv(report));
}

}  // namespace idprice
