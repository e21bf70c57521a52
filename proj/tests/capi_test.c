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

/* Exercises the C interface from C. */

#include <loadcast/loadcast.h>
#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

static int failures = 0;

#define EXPECT(cond)                                                    \
  do {                                                                  \
    if (!(cond)) {                                                      \
      fprintf(stderr, "%s:%d: EXPECT(%s) failed; last error: %s\n",     \
              __FILE__, __LINE__, #cond, lc_last_error());              \
      ++failures;                                                       \
    }                                                                   \
  } while (0)

static const char* kOptions =
    "{\"spec\": {\"load\": {\"intercept\": [\"G1\"], \"regressors\": ["
    "{\"channel\": \"load\", \"lags\": \"1..2,24\", \"thresholds\": [\"-inf\"]},"
    "{\"channel\": \"temperature\", \"lags\": \"1..2\", \"thresholds\": [\"-inf\"]}]},"
    "\"temperature\": {\"intercept\": [\"G1\", \"G4\"], \"regressors\": ["
    "{\"channel\": \"temperature\", \"lags\": \"1..2,24\", \"thresholds\": [\"-inf\"]}]}}}";

static int log_calls = 0;
static void on_log(int level, const char* message, void* user) {
  (void)level;
  (void)message;
  ++*(int*)user;
}

/* Deterministic series with daily and annual cycles and a small
   pseudo-random disturbance. */
static void make_series(size_t n, double* load, double* temp) {
  unsigned long long x = 88172645463325252ULL;
  double e = 0;
  for (size_t i = 0; i < n; ++i) {
    x ^= x << 13;
    x ^= x >> 7;
    x ^= x << 17;
    e = 0.8 * e + ((double)(x % 10000) / 10000.0 - 0.5);
    const double h = (double)i;
    temp[i] = 55 - 20 * cos(2 * 3.141592653589793 * h / 8760.0) - 8 * cos(2 * 3.141592653589793 * (h - 3) / 24) + e;
    load[i] = 1000 + 0.4 * (temp[i] - 60) * (temp[i] - 60) + 50 * sin(2 * 3.141592653589793 * h / 24) + 5 * e;
  }
}

int main(void) {
  EXPECT(strlen(lc_version()) > 0);
  EXPECT(strcmp(lc_status_name(LC_STATUS_DATA), "data error") == 0);

  lc_series* bad = NULL;
  double one = 1.0;
  EXPECT(lc_series_from_arrays("2011-13-01 00:00", &one, &one, 1, &bad) == LC_STATUS_INVALID_ARGUMENT);
  EXPECT(bad == NULL);
  EXPECT(strlen(lc_last_error()) > 0);
  EXPECT(lc_series_from_arrays("2011-01-01 00:00", &one, &one, 1, NULL) == LC_STATUS_INVALID_ARGUMENT);
  lc_quantiles* none = NULL;
  EXPECT(lc_quantiles_read_csv("/nonexistent/q.csv", &none) == LC_STATUS_IO);
  EXPECT(lc_validate_config("/nonexistent/config.json", NULL) == LC_STATUS_INVALID_ARGUMENT);

  const size_t n = 24 * (365 + 31);
  double* load = malloc(n * sizeof(double));
  double* temp = malloc(n * sizeof(double));
  make_series(n, load, temp);
  lc_series* s = NULL;
  EXPECT(lc_series_from_arrays("2010-01-01 00:00", load, temp, n, &s) == LC_STATUS_OK);
  EXPECT(lc_series_length(s) == n);
  char* start = NULL;
  EXPECT(lc_series_start(s, &start) == LC_STATUS_OK);
  EXPECT(start && strcmp(start, "2010-01-01 00:00") == 0);
  lc_string_free(start);

  lc_set_log_callback(on_log, &log_calls);
  lc_model* m = NULL;
  EXPECT(lc_model_fit(s, "{\"bogus\": 1}", NULL, &m) == LC_STATUS_INVALID_ARGUMENT);
  EXPECT(lc_model_fit(s, kOptions, "2010-12-31", &m) == LC_STATUS_OK);
  lc_set_log_callback(NULL, NULL);
  EXPECT(log_calls > 0);
  char* report = NULL;
  EXPECT(lc_model_report(m, &report) == LC_STATUS_OK);
  EXPECT(report && strstr(report, "lambda") != NULL);
  lc_string_free(report);

  lc_quantiles* q = NULL;
  EXPECT(lc_model_forecast(m, s, 48, 500, 7, 1, &q) == LC_STATUS_OK);
  EXPECT(lc_quantiles_hours(q) == 48);
  int monotone = 1;
  for (size_t h = 0; h < 48; ++h) {
    double lo = -INFINITY;
    for (int k = 1; k <= 99; ++k) {
      double v = 0;
      EXPECT(lc_quantiles_get(q, h, k, &v) == LC_STATUS_OK);
      if (v < lo) monotone = 0;
      lo = v;
    }
  }
  EXPECT(monotone);
  double dummy;
  EXPECT(lc_quantiles_get(q, 0, 100, &dummy) == LC_STATUS_INVALID_ARGUMENT);
  EXPECT(lc_quantiles_get(q, 48, 1, &dummy) == LC_STATUS_INVALID_ARGUMENT);
  char* qstart = NULL;
  EXPECT(lc_quantiles_start(q, &qstart) == LC_STATUS_OK);
  EXPECT(qstart && strcmp(qstart, "2011-01-01 00:00") == 0);
  lc_string_free(qstart);

  /* Same seed, same forecast. */
  lc_quantiles* q2 = NULL;
  EXPECT(lc_model_forecast(m, s, 48, 500, 7, 1, &q2) == LC_STATUS_OK);
  int same = 1;
  for (size_t h = 0; h < 48; ++h)
    for (int k = 1; k <= 99; ++k) {
      double a = 0, b = 0;
      lc_quantiles_get(q, h, k, &a);
      lc_quantiles_get(q2, h, k, &b);
      if (a != b) same = 0;
    }
  EXPECT(same);

  const char* path = "capi_test_q.csv";
  EXPECT(lc_quantiles_write_csv(q, path) == LC_STATUS_OK);
  lc_quantiles* back = NULL;
  EXPECT(lc_quantiles_read_csv(path, &back) == LC_STATUS_OK);
  EXPECT(lc_quantiles_hours(back) == 48);
  double a = 0, b = 0;
  lc_quantiles_get(q, 17, 63, &a);
  lc_quantiles_get(back, 17, 63, &b);
  EXPECT(a == b);
  remove(path);

  double actual[48], score = -1;
  for (size_t h = 0; h < 48; ++h) actual[h] = load[24 * 365 + h];
  EXPECT(lc_pinball(q, actual, 48, &score) == LC_STATUS_OK);
  EXPECT(score > 0 && isfinite(score));
  EXPECT(lc_pinball(q, actual, 47, &score) == LC_STATUS_INVALID_ARGUMENT);
  char* eval = NULL;
  EXPECT(lc_evaluate(q, s, &eval) == LC_STATUS_OK);
  EXPECT(eval && strstr(eval, "\"hours\":48") != NULL);
  lc_string_free(eval);

  lc_quantiles* tq = NULL;
  char* treport = NULL;
  EXPECT(lc_task_forecast(s, kOptions, "lasso", "month-ahead", "2010-12-31", 200, 1, &tq, &treport) == LC_STATUS_OK);
  EXPECT(lc_quantiles_hours(tq) == 744);
  EXPECT(treport != NULL);
  lc_string_free(treport);
  EXPECT(lc_task_forecast(s, NULL, "arima", "month-ahead", "2010-12-31", 200, 1, &tq, NULL) ==
         LC_STATUS_INVALID_ARGUMENT);
  EXPECT(lc_task_forecast(s, kOptions, "lasso", "month-ahead", "2011-05-31", 200, 1, &tq, NULL) == LC_STATUS_DATA);

  /* Station ranking on a file where station 2 tracks the temperature that
     drives load. */
  const char* csv = "capi_test_stations.csv";
  FILE* f = fopen(csv, "w");
  EXPECT(f != NULL);
  if (f) {
    fprintf(f, "timestamp,load,t1,t2\n");
    for (size_t i = 0; i < 24 * 59; ++i) {
      const unsigned day = (unsigned)(i / 24), hour = (unsigned)(i % 24);
      const unsigned month = day < 31 ? 1 : 2, dom = day < 31 ? day + 1 : day - 30;
      fprintf(f, "2011-%02u-%02u %02u:00,%.6f,%.6f,%.6f\n", month, dom, hour, load[i],
              temp[i] + 10 * sin((double)i * 1.7), temp[i]);
    }
    fclose(f);
  }
  char* rank = NULL;
  EXPECT(lc_rank_stations(csv, NULL, 1, &rank) == LC_STATUS_OK);
  EXPECT(rank && strstr(rank, "\"singles\"") != NULL);
  if (rank) {
    const char* first = strstr(rank, "\"stations\"");
    EXPECT(first && strchr(first, '2') && strchr(first, '2') < strchr(first, ']'));
  }
  lc_string_free(rank);
  remove(csv);

  lc_quantiles_free(tq);
  lc_quantiles_free(back);
  lc_quantiles_free(q2);
  lc_quantiles_free(q);
  lc_model_free(m);
  lc_series_free(s);
  free(load);
  free(temp);

  if (failures) {
    fprintf(stderr, "%d expectation(s) failed\n", failures);
    return 1;
  }
  printf("capi: all expectations passed\n");
  return 0;
}
