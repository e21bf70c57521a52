/*
  Copyright 2026 The loadcast Authors

  Licensed under the Apache License, Version 2.0 (the "License");
  you may not use this file except in compliance with the License.
  You may obtain a copy of the License at

  http://www.apache.org/licenses/LICENSE-2.0

  Unless required by applicable law or agreed to in writing, software
  distributed under the License is distributed on an "AS IS" BASIS,
  WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
  See the License for the specific language governing permissions and
  limitations under the License.
*/

/* C interface to loadcast. Objects are opaque and owned by the caller, who
   releases them with the matching *_free function. Every function returning
   lc_status stores a message retrievable with lc_last_error on failure.
   Strings returned through char** are freed with lc_string_free. */

#ifndef LOADCAST_LOADCAST_H
#define LOADCAST_LOADCAST_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define LC_API __declspec(dllexport)
#else
#define LC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
  LC_STATUS_OK = 0,
  LC_STATUS_INVALID_ARGUMENT = 1,
  LC_STATUS_IO = 2,
  LC_STATUS_PARSE = 3,
  LC_STATUS_DATA = 4,
  LC_STATUS_NUMERIC = 5,
  LC_STATUS_INTERNAL = 6
} lc_status;

typedef struct lc_series lc_series;
typedef struct lc_model lc_model;
typedef struct lc_quantiles lc_quantiles;

LC_API const char* lc_version(void);
LC_API const char* lc_status_name(lc_status status);
/* Message of the last failure on the calling thread; "" if none. */
LC_API const char* lc_last_error(void);
LC_API void lc_string_free(char* s);

/* level: 0 debug, 1 info, 2 warning. NULL restores the stderr default,
   which shows warnings only. */
typedef void (*lc_log_fn)(int level, const char* message, void* user);
LC_API void lc_set_log_callback(lc_log_fn fn, void* user);

/* Hourly series. `stations` is a rule such as "avg:all", "avg:3,9" or "2";
   NULL means "avg:all". */
LC_API lc_status lc_series_load_csv(const char* path, const char* stations, lc_series** out);
/* `start` is "YYYY-MM-DD HH:MM" local standard time; NaN marks missing. */
LC_API lc_status lc_series_from_arrays(const char* start, const double* load, const double* temperature,
                                       size_t n, lc_series** out);
LC_API size_t lc_series_length(const lc_series* s);
LC_API lc_status lc_series_start(const lc_series* s, char** out);
LC_API void lc_series_free(lc_series* s);

/* Fits the bivariate lasso model on hours up to 23:00 of `cutoff`
   ("YYYY-MM-DD"; NULL uses the whole series). `options_json` may be NULL or
   an object with keys dataset, spec, holidays and lambda_grid. Relative
   paths resolve against the working directory. */
LC_API lc_status lc_model_fit(const lc_series* s, const char* options_json, const char* cutoff, lc_model** out);
LC_API lc_status lc_model_report(const lc_model* m, char** json);
/* Simulates `hours` ahead of the fitted sample using `history` for the lag
   values; `history` must start where the fitted series did and cover the
   fitted sample. */
LC_API lc_status lc_model_forecast(const lc_model* m, const lc_series* history, size_t hours, size_t paths,
                                   uint64_t seed, unsigned threads, lc_quantiles** out);
LC_API void lc_model_free(lc_model* m);

/* One rolling task. model: "lasso", "vanilla", "recency" or "vanilla-5y";
   kind: "month-ahead" or "year-ahead". `report_json` may be NULL. */
LC_API lc_status lc_task_forecast(const lc_series* s, const char* options_json, const char* model,
                                  const char* kind, const char* cutoff, size_t paths, uint64_t seed,
                                  lc_quantiles** out, char** report_json);

LC_API lc_status lc_quantiles_read_csv(const char* path, lc_quantiles** out);
LC_API lc_status lc_quantiles_write_csv(const lc_quantiles* q, const char* path);
LC_API size_t lc_quantiles_hours(const lc_quantiles* q);
/* level in 1..99 */
LC_API lc_status lc_quantiles_get(const lc_quantiles* q, size_t hour, int level, double* out);
LC_API lc_status lc_quantiles_start(const lc_quantiles* q, char** out);
LC_API void lc_quantiles_free(lc_quantiles* q);

/* Mean pinball loss over hours with a non-NaN actual; `n` must equal the
   forecast length. */
LC_API lc_status lc_pinball(const lc_quantiles* q, const double* actual, size_t n, double* score);
/* Aligns by timestamp and returns {"pinball","mape","hours","missing"}. */
LC_API lc_status lc_evaluate(const lc_quantiles* q, const lc_series* actuals, char** json);

/* Batch runs from a JSON config file. `overrides` is a JSON object merged
   over the file; may be NULL. A task failure does not fail the call;
   `failures` counts them. */
LC_API lc_status lc_validate_config(const char* config_path, const char* overrides);
LC_API lc_status lc_run(const char* config_path, const char* overrides, char** summary_json, size_t* failures);

/* Station ranking JSON from a raw CSV, using hours up to 23:00 of `cutoff`
   (NULL: all). */
LC_API lc_status lc_rank_stations(const char* csv_path, const char* cutoff, int with_pairs, char** json);

#ifdef __cplusplus
}
#endif

#endif /* LOADCAST_LOADCAST_H */
