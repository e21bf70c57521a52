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

#include "loadcast/loadcast.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <json.hpp>
#include <new>
#include <string>

#include "error.hpp"
#include "evaluation.hpp"
#include "fileio.hpp"
#include "forecast.hpp"
#include "ingest.hpp"
#include "model.hpp"
#include "runner.hpp"

struct lc_series {
  loadcast::HourlySeries series;
};
struct lc_model {
  loadcast::BivariateModel model;
};
struct lc_quantiles {
  loadcast::QuantileForecast forecast;
};

namespace {

using loadcast::ErrorKind;
using loadcast::fail;

thread_local std::string last_error;

lc_status status_of(ErrorKind k) {
  switch (k) {
    case ErrorKind::InvalidArgument: return LC_STATUS_INVALID_ARGUMENT;
    case ErrorKind::Io: return LC_STATUS_IO;
    case ErrorKind::Parse: return LC_STATUS_PARSE;
    case ErrorKind::Data: return LC_STATUS_DATA;
    case ErrorKind::Numeric: return LC_STATUS_NUMERIC;
  }
  return LC_STATUS_INTERNAL;
}

template <class F>
lc_status guarded(F&& f) {
  try {
    last_error.clear();
    f();
    return LC_STATUS_OK;
  } catch (const loadcast::Error& e) {
    last_error = e.what();
    return status_of(e.kind());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
  } catch (const std::exception& e) {
    last_error = e.what();
  } catch (...) {
    last_error = "unknown failure";
  }
  return LC_STATUS_INTERNAL;
}

template <class T>
void need(const T* p, const char* name) {
  if (!p) fail(ErrorKind::InvalidArgument, std::string(name) + " is NULL");
}

char* dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

loadcast::ModelOptions options_of(const char* json) {
  return loadcast::parse_model_options(json ? json : "", ".");
}

std::chrono::year_month_day date_of(const char* text, const char* name) {
  need(text, name);
  return loadcast::parse_date(text);
}

}  // namespace

extern "C" {

const char* lc_version(void) { return "0.1.0"; }

const char* lc_status_name(lc_status status) {
  switch (status) {
    case LC_STATUS_OK: return "ok";
    case LC_STATUS_INVALID_ARGUMENT: return "invalid argument";
    case LC_STATUS_IO: return "i/o error";
    case LC_STATUS_PARSE: return "parse error";
    case LC_STATUS_DATA: return "data error";
    case LC_STATUS_NUMERIC: return "numeric error";
    case LC_STATUS_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* lc_last_error(void) { return last_error.c_str(); }

void lc_string_free(char* s) { std::free(s); }

void lc_set_log_callback(lc_log_fn fn, void* user) {
  if (!fn) {
    loadcast::set_log_sink(loadcast::default_log_sink());
    return;
  }
  loadcast::set_log_sink([fn, user](loadcast::LogLevel level, const std::string& msg) {
    fn(static_cast<int>(level), msg.c_str(), user);
  });
}

lc_status lc_series_load_csv(const char* path, const char* stations, lc_series** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    const auto rule = loadcast::StationRule::parse(stations ? stations : "avg:all");
    *out = new lc_series{loadcast::ingest(path, rule)};
  });
}

lc_status lc_series_from_arrays(const char* start, const double* load, const double* temperature, size_t n,
                                lc_series** out) {
  return guarded([&] {
    need(start, "start");
    need(out, "out");
    if (n > 0) {
      need(load, "load");
      need(temperature, "temperature");
    }
    const auto origin = loadcast::parse_timestamp(start);
    if (!origin) fail(ErrorKind::InvalidArgument, std::string("malformed start timestamp '") + start + "'");
    *out = new lc_series{loadcast::HourlySeries(loadcast::HourGrid(*origin, n), std::vector<double>(load, load + n),
                                                std::vector<double>(temperature, temperature + n))};
  });
}

size_t lc_series_length(const lc_series* s) { return s ? s->series.size() : 0; }

lc_status lc_series_start(const lc_series* s, char** out) {
  return guarded([&] {
    need(s, "series");
    need(out, "out");
    *out = dup(loadcast::format_timestamp(s->series.grid().origin()));
  });
}

void lc_series_free(lc_series* s) { delete s; }

lc_status lc_model_fit(const lc_series* s, const char* options_json, const char* cutoff, lc_model** out) {
  return guarded([&] {
    need(s, "series");
    need(out, "out");
    const auto opt = options_of(options_json);
    const std::int64_t end = cutoff ? loadcast::cutoff_end(s->series.grid(), date_of(cutoff, "cutoff")) : -1;
    loadcast::FitOptions fit;
    fit.lasso = opt.lasso;
    *out = new lc_model{loadcast::fit_bivariate(s->series, opt.spec, opt.holidays, fit, end)};
  });
}

lc_status lc_model_report(const lc_model* m, char** json) {
  return guarded([&] {
    need(m, "model");
    need(json, "json");
    *json = dup(loadcast::fit_report_json(m->model));
  });
}

lc_status lc_model_forecast(const lc_model* m, const lc_series* history, size_t hours, size_t paths, uint64_t seed,
                            unsigned threads, lc_quantiles** out) {
  return guarded([&] {
    need(m, "model");
    need(history, "history");
    need(out, "out");
    if (hours == 0 || paths == 0 || threads == 0)
      fail(ErrorKind::InvalidArgument, "hours, paths and threads must be positive");
    const auto& h = history->series;
    if (!(h.grid().origin() == m->model.grid.origin()))
      fail(ErrorKind::InvalidArgument, "history must start at the fitted series origin " +
                                           loadcast::format_timestamp(m->model.grid.origin()));
    if (h.size() < static_cast<std::size_t>(m->model.end))
      fail(ErrorKind::InvalidArgument, "history is shorter than the fitted sample");
    loadcast::SimulationConfig cfg;
    cfg.n_paths = paths;
    cfg.horizon = hours;
    cfg.seed = seed;
    cfg.threads = threads;
    *out = new lc_quantiles{
        loadcast::simulate_quantiles(m->model, h.truncated(static_cast<std::size_t>(m->model.end)), cfg)};
  });
}

void lc_model_free(lc_model* m) { delete m; }

lc_status lc_task_forecast(const lc_series* s, const char* options_json, const char* model, const char* kind,
                           const char* cutoff, size_t paths, uint64_t seed, lc_quantiles** out, char** report_json) {
  return guarded([&] {
    need(s, "series");
    need(model, "model");
    need(kind, "kind");
    need(out, "out");
    const auto mk = loadcast::parse_model_kind(model);
    if (!mk) fail(ErrorKind::InvalidArgument, std::string("unknown model '") + model + "'");
    const auto tk = loadcast::parse_task_kind(kind);
    if (!tk) fail(ErrorKind::InvalidArgument, std::string("unknown task kind '") + kind + "'");
    if (paths == 0) fail(ErrorKind::InvalidArgument, "paths must be positive");
    loadcast::TaskRequest req;
    req.model = *mk;
    req.task = {*tk, date_of(cutoff, "cutoff")};
    req.paths = paths;
    req.seed = seed;
    std::string report;
    auto qf = loadcast::forecast_task(s->series, options_of(options_json), req, &report);
    if (report_json) *report_json = dup(report);
    *out = new lc_quantiles{std::move(qf)};
  });
}

lc_status lc_quantiles_read_csv(const char* path, lc_quantiles** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = new lc_quantiles{loadcast::QuantileForecast::read_csv(path)};
  });
}

lc_status lc_quantiles_write_csv(const lc_quantiles* q, const char* path) {
  return guarded([&] {
    need(q, "quantiles");
    need(path, "path");
    loadcast::write_file_atomic(path, q->forecast.to_csv());
  });
}

size_t lc_quantiles_hours(const lc_quantiles* q) { return q ? q->forecast.hours() : 0; }

lc_status lc_quantiles_get(const lc_quantiles* q, size_t hour, int level, double* out) {
  return guarded([&] {
    need(q, "quantiles");
    need(out, "out");
    if (hour >= q->forecast.hours()) fail(ErrorKind::InvalidArgument, "hour out of range");
    if (level < 1 || level > 99) fail(ErrorKind::InvalidArgument, "level must lie in 1..99");
    *out = q->forecast.rows[hour][static_cast<std::size_t>(level - 1)];
  });
}

lc_status lc_quantiles_start(const lc_quantiles* q, char** out) {
  return guarded([&] {
    need(q, "quantiles");
    need(out, "out");
    *out = dup(loadcast::format_timestamp(q->forecast.start));
  });
}

void lc_quantiles_free(lc_quantiles* q) { delete q; }

lc_status lc_pinball(const lc_quantiles* q, const double* actual, size_t n, double* score) {
  return guarded([&] {
    need(q, "quantiles");
    need(score, "score");
    if (n) need(actual, "actual");
    *score = loadcast::pinball(q->forecast, std::span<const double>(actual, n)).score;
  });
}

lc_status lc_evaluate(const lc_quantiles* q, const lc_series* actuals, char** json) {
  return guarded([&] {
    need(q, "quantiles");
    need(actuals, "actuals");
    need(json, "json");
    const auto sc = loadcast::score_task("", "", q->forecast, actuals->series);
    nlohmann::ordered_json j;
    auto num = [](double v) { return std::isnan(v) ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(v); };
    j["pinball"] = num(sc.pinball);
    j["mape"] = num(sc.mape);
    j["hours"] = sc.hours;
    j["missing"] = sc.missing;
    *json = dup(j.dump());
  });
}

lc_status lc_validate_config(const char* config_path, const char* overrides) {
  return guarded([&] {
    need(config_path, "config_path");
    loadcast::load_run_config(config_path, overrides ? overrides : "");
  });
}

lc_status lc_run(const char* config_path, const char* overrides, char** summary_json, size_t* failures) {
  return guarded([&] {
    need(config_path, "config_path");
    const auto cfg = loadcast::load_run_config(config_path, overrides ? overrides : "");
    const auto result = loadcast::run_tasks(cfg);
    if (summary_json) *summary_json = dup(result.summary_json());
    if (failures) *failures = result.failures();
  });
}

lc_status lc_rank_stations(const char* csv_path, const char* cutoff, int with_pairs, char** json) {
  return guarded([&] {
    need(csv_path, "csv_path");
    need(json, "json");
    loadcast::RawTable t = loadcast::read_csv(csv_path);
    if (cutoff) {
      const auto end = static_cast<std::size_t>(loadcast::cutoff_end(t.grid, date_of(cutoff, "cutoff")));
      t.grid = loadcast::HourGrid(t.grid.origin(), end);
      t.load.resize(end);
      for (auto& c : t.stations) c.resize(end);
    }
    const auto r = loadcast::station_rank(t, with_pairs != 0);
    auto list = [](const std::vector<loadcast::StationScore>& v) {
      nlohmann::ordered_json a = nlohmann::ordered_json::array();
      for (const auto& s : v) a.push_back({{"stations", s.stations}, {"rss", s.rss}, {"hours", s.hours}});
      return a;
    };
    nlohmann::ordered_json j;
    j["singles"] = list(r.singles);
    if (with_pairs) j["pairs"] = list(r.pairs);
    *json = dup(j.dump(2));
  });
}

}  // extern "C"
