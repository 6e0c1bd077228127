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

#include "idprice.h"

#include <exception>
#include <span>
#include <string>
#include <vector>

#include "commands.hpp"
#include "error.hpp"
#include "eval.hpp"
#include "market_data.hpp"

struct idp_error {
  idp_status status;
  std::string message;
};

struct idp_series {
  idprice::ParseResult parsed;
};

struct idp_options {
  idprice::Options values;
};

namespace {

idp_status status_from_kind(idprice::ErrorKind kind) {
  switch (kind) {
    case idprice::ErrorKind::usage:
      return IDP_USAGE_ERROR;
    case idprice::ErrorKind::data:
      return IDP_DATA_ERROR;
    case idprice::ErrorKind::numeric:
      return IDP_NUMERIC_ERROR;
  }
  return IDP_DATA_ERROR;
}

void set_error(idp_error** error, idp_status status, std::string message) {
  if (error) *error = new idp_error{status, std::move(message)};
}

// Runs `fn`, translating exceptions into status codes.
template <typename Fn>
idp_status guarded(idp_error** error, Fn&& fn) {
  if (error) *error = nullptr;
  try {
    fn();
    return IDP_OK;
  } catch (const idprice::Error& e) {
    const idp_status status = status_from_kind(e.kind());
    set_error(error, status, e.what());
    return status;
  } catch (const std::exception& e) {
    set_error(error, IDP_DATA_ERROR, e.what());
    return IDP_DATA_ERROR;
  }
}

}  // namespace

extern "C" {

const char* idp_version(void) { return "0.1.0"; }

idp_status idp_error_status(const idp_error* error) {
  return error ? error->status : IDP_OK;
}

const char* idp_error_message(const idp_error* error) {
  return error ? error->message.c_str() : "";
}

void idp_error_free(idp_error* error) { delete error; }

idp_status idp_series_load_csv(const char* path, idp_series** out,
                               idp_error** error) {
  if (!path || !out) {
    set_error(error, IDP_USAGE_ERROR, "path and out must be non-NULL");
    return IDP_USAGE_ERROR;
  }
  *out = nullptr;
  return guarded(error, [&] {
    *out = new idp_series{idprice::load_market_csv(path)};
  });
}

idp_status idp_series_parse_csv(const char* text, idp_series** out,
                                idp_error** error) {
  if (!text || !out) {
    set_error(error, IDP_USAGE_ERROR, "text and out must be non-NULL");
    return IDP_USAGE_ERROR;
  }
  *out = nullptr;
  return guarded(error, [&] {
    *out = new idp_series{idprice::parse_market_csv(text)};
  });
}

void idp_series_free(idp_series* series) { delete series; }

size_t idp_series_record_count(const idp_series* series) {
  return series ? series->parsed.series.record_count() : 0;
}

size_t idp_series_zone_count(const idp_series* series) {
  return series ? series->parsed.series.zones().size() : 0;
}

const char* idp_series_zone_name(const idp_series* series, size_t index) {
  if (!series || index >= series->parsed.series.zones().size()) return nullptr;
  return series->parsed.series.zones()[index].c_str();
}

size_t idp_series_warning_count(const idp_series* series) {
  return series ? series->parsed.warnings.size() : 0;
}

const char* idp_series_warning(const idp_series* series, size_t index) {
  if (!series || index >= series->parsed.warnings.size()) return nullptr;
  return series->parsed.warnings[index].message.c_str();
}

idp_status idp_price_variation(double high, double low, double avg,
                               double* out, idp_error** error) {
  if (!out) {
    set_error(error, IDP_USAGE_ERROR, "out must be non-NULL");
    return IDP_USAGE_ERROR;
  }
  return guarded(error, [&] { *out = idprice::price_variation(high, low, avg); });
}

idp_status idp_volume_share(double id_volume, double da_volume, double* out,
                            idp_error** error) {
  if (!out) {
    set_error(error, IDP_USAGE_ERROR, "out must be non-NULL");
    return IDP_USAGE_ERROR;
  }
  return guarded(error, [&] { *out = idprice::volume_share(id_volume, da_volume); });
}

idp_status idp_ks_statistic(const double* a, size_t a_len, const double* b,
                            size_t b_len, double* out, idp_error** error) {
  if (!a || !b || !out) {
    set_error(error, IDP_USAGE_ERROR, "inputs must be non-NULL");
    return IDP_USAGE_ERROR;
  }
  return guarded(error, [&] {
    *out = idprice::ks_statistic(std::span<const double>(a, a_len),
                                 std::span<const double>(b, b_len));
  });
}

idp_status idp_compute_stats(const double* values, size_t len, idp_stats* out,
                             idp_error** error) {
  if (!values || !out) {
    set_error(error, IDP_USAGE_ERROR, "inputs must be non-NULL");
    return IDP_USAGE_ERROR;
  }
  return guarded(error, [&] {
    const idprice::StatSummary s =
        idprice::stat_summary(std::span<const double>(values, len));
    *out = idp_stats{static_cast<double>(s.count), s.mean, s.stddev,
                     s.min,  s.p25,  s.p50,  s.p75,  s.max};
  });
}

idp_options* idp_options_new(void) { return new idp_options{}; }

idp_status idp_options_set(idp_options* options, const char* key,
                           const char* value, idp_error** error) {
  if (!options || !key || !value) {
    set_error(error, IDP_USAGE_ERROR, "options, key and value must be non-NULL");
    return IDP_USAGE_ERROR;
  }
  return guarded(error, [&] {
    if (!idprice::is_known_option(key)) {
      throw idprice::Error::usage("unknown option '" + std::string(key) + "'");
    }
    options->values[key] = value;
  });
}

idp_status idp_options_load_file(idp_options* options, const char* path,
                                 idp_error** error) {
  if (!options || !path) {
    set_error(error, IDP_USAGE_ERROR, "options and path must be non-NULL");
    return IDP_USAGE_ERROR;
  }
  return guarded(error, [&] {
    options->values =
        idprice::merge_options(idprice::load_config_file(path), options->values);
  });
}

void idp_options_free(idp_options* options) { delete options; }

idp_status idp_run_explore(const idp_options* options, idp_error** error) {
  if (!options) {
    set_error(error, IDP_USAGE_ERROR, "options must be non-NULL");
    return IDP_USAGE_ERROR;
  }
  return guarded(error, [&] { idprice::cmd_explore(options->values); });
}

idp_status idp_run_train(const idp_options* options, idp_error** error) {
  if (!options) {
    set_error(error, IDP_USAGE_ERROR, "options must be non-NULL");
    return IDP_USAGE_ERROR;
  }
  return guarded(error, [&] { idprice::cmd_train(options->values); });
}

idp_status idp_run_generate(const idp_options* options, idp_error** error) {
  if (!options) {
    set_error(error, IDP_USAGE_ERROR, "options must be non-NULL");
    return IDP_USAGE_ERROR;
  }
  return guarded(error, [&] { idprice::cmd_generate(options->values); });
}

idp_status idp_run_evaluate(const idp_options* options, idp_error** error) {
  if (!options) {
    set_error(error, IDP_USAGE_ERROR, "options must be non-NULL");
    return IDP_USAGE_ERROR;
  }
  return guarded(error, [&] { idprice::cmd_evaluate(options->values); });
}

}  // extern "C"
