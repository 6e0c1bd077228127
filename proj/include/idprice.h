/* Copyright 2026 idprice authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* C API of libidprice: intraday electricity price modeling and evaluation.
 *
 * Conventions:
 *   - Every fallible function returns an idp_status and reports details
 *     through an optional idp_error out-parameter (pass NULL to ignore).
 *     A non-NULL *error must be released with idp_error_free().
 *   - Objects returned through out-parameters are owned by the caller and
 *     released with the matching *_free function.
 *   - Status values double as process exit codes in the bundled CLI.
 */

#ifndef IDPRICE_H
#define IDPRICE_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum idp_status {
  IDP_OK = 0,
  IDP_USAGE_ERROR = 1,   /* bad flags, config, or argument combination */
  IDP_DATA_ERROR = 2,    /* unreadable/malformed input or domain violation */
  IDP_NUMERIC_ERROR = 3  /* divergence or sampling-quality failure */
} idp_status;

const char* idp_version(void);

/* ------------------------------------------------------------------ */
/* Errors                                                              */

typedef struct idp_error idp_error;

idp_status idp_error_status(const idp_error* error);
const char* idp_error_message(const idp_error* error);
void idp_error_free(idp_error* error);

/* ------------------------------------------------------------------ */
/* Market series                                                       */

typedef struct idp_series idp_series;

/* Parses the hourly market CSV (header:
 * timestamp,zone,da_price,id_high,id_low,id_last,id_avg,buy_volume,
 * sell_volume). Ill-formed rows become warnings, not errors. */
idp_status idp_series_load_csv(const char* path, idp_series** out,
                               idp_error** error);
idp_status idp_series_parse_csv(const char* text, idp_series** out,
                                idp_error** error);
void idp_series_free(idp_series* series);

size_t idp_series_record_count(const idp_series* series);
size_t idp_series_zone_count(const idp_series* series);
const char* idp_series_zone_name(const idp_series* series, size_t index);
size_t idp_series_warning_count(const idp_series* series);
/* Warning text for index < warning_count; NULL otherwise. */
const char* idp_series_warning(const idp_series* series, size_t index);

/* ------------------------------------------------------------------ */
/* Scalar market metrics                                               */

/* (high - low) / avg * 100. Fails when avg is 0 or high < low. */
idp_status idp_price_variation(double high, double low, double avg,
                               double* out, idp_error** error);

/* 100 * id_volume / da_volume. Fails when da_volume <= 0. */
idp_status idp_volume_share(double id_volume, double da_volume, double* out,
                            idp_error** error);

/* ------------------------------------------------------------------ */
/* Distribution comparison                                             */

/* Two-sample Kolmogorov-Smirnov statistic in [0, 1]. */
idp_status idp_ks_statistic(const double* a, size_t a_len, const double* b,
                            size_t b_len, double* out, idp_error** error);

typedef struct idp_stats {
  double count;
  double mean;
  double stddev; /* sample standard deviation (n-1) */
  double min;
  double p25;
  double p50;
  double p75;
  double max;
} idp_stats;

idp_status idp_compute_stats(const double* values, size_t len,
                             idp_stats* out, idp_error** error);

/* ------------------------------------------------------------------ */
/* Commands                                                            */

/* String key/value option bag; keys match the CLI long flag names
 * (input, zone, field, model, train-range, test-range, epochs, hidden,
 * window, latent, components, warmup, samples, bins, seed, out, checkpoint,
 * count, date, actual, generated, ...). */
typedef struct idp_options idp_options;

idp_options* idp_options_new(void);
idp_status idp_options_set(idp_options* options, const char* key,
                           const char* value, idp_error** error);
/* Loads a key = value config file; values already present in `options`
 * (e.g. from flags) win over the file. */
idp_status idp_options_load_file(idp_options* options, const char* path,
                                 idp_error** error);
void idp_options_free(idp_options* options);

/* Writes variation.csv, similar_prices.csv, volume_share.csv and
 * histograms.csv under --out. */
idp_status idp_run_explore(const idp_options* options, idp_error** error);
/* Trains --model lstm|dcgan|nuts; writes checkpoint.json + history.csv. */
idp_status idp_run_train(const idp_options* options, idp_error** error);
/* Writes scenarios.csv from a checkpoint (--count draws, or --date for
 * lstm profiles). */
idp_status idp_run_generate(const idp_options* options, idp_error** error);
/* Writes report.json + histograms.csv comparing --actual and --generated. */
idp_status idp_run_evaluate(const idp_options* options, idp_error** error);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* IDPRICE_H */
