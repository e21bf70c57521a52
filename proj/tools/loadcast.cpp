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

// Command-line front end over the C API.

#include <loadcast/loadcast.h>

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;

int exit_code(lc_status s) {
  switch (s) {
    case LC_STATUS_OK: return 0;
    case LC_STATUS_INVALID_ARGUMENT:
    case LC_STATUS_PARSE:
    case LC_STATUS_IO: return kExitValidation;
    default: return kExitRuntime;
  }
}

struct Failed {
  int code;
};

void check(lc_status s, const std::string& what) {
  if (s == LC_STATUS_OK) return;
  std::cerr << "loadcast: " << what << ": " << lc_status_name(s) << ": " << lc_last_error() << "\n";
  throw Failed{exit_code(s)};
}

struct Text {
  char* p = nullptr;
  ~Text() { lc_string_free(p); }
  std::string str() const { return p ? p : ""; }
};

template <class T, void (*F)(T*)>
struct Handle {
  T* p = nullptr;
  ~Handle() { F(p); }
};
using Series = Handle<lc_series, lc_series_free>;
using Quantiles = Handle<lc_quantiles, lc_quantiles_free>;
using Model = Handle<lc_model, lc_model_free>;

// JSON given inline or as @path.
std::string json_arg(const std::string& v) {
  if (v.empty() || v[0] != '@') return v;
  std::ifstream in(v.substr(1));
  if (!in) {
    std::cerr << "loadcast: cannot read " << v.substr(1) << "\n";
    throw Failed{kExitValidation};
  }
  std::ostringstream o;
  o << in.rdbuf();
  return o.str();
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << "\n";
    return;
  }
  std::ofstream out(path);
  out << text;
  if (!out) {
    std::cerr << "loadcast: cannot write " << path << "\n";
    throw Failed{kExitRuntime};
  }
}

void log_to_stderr(int level, const char* message, void*) {
  static const char* names[] = {"debug", "info", "warning"};
  std::fprintf(stderr, "loadcast [%s] %s\n", names[level < 0 || level > 2 ? 2 : level], message);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Probabilistic hourly load forecasting"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(lc_version()));
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "Log progress to stderr");

  std::string data, stations, options, cutoff, out, model = "lasso", kind = "month-ahead", report;
  std::size_t paths = 10000;
  std::uint64_t seed = 1;

  auto* fit = app.add_subcommand("fit", "Fit the lasso model and print its report");
  fit->add_option("--data", data, "Hourly CSV")->required()->check(CLI::ExistingFile);
  fit->add_option("--stations", stations, "Station rule, e.g. avg:3,9");
  fit->add_option("--options", options, "Model options as JSON or @file");
  fit->add_option("--cutoff", cutoff, "Last in-sample day YYYY-MM-DD");
  fit->add_option("--out", out, "Report path (default stdout)");

  auto* fc = app.add_subcommand("forecast", "Forecast one task and write its quantiles");
  fc->add_option("--data", data, "Hourly CSV")->required()->check(CLI::ExistingFile);
  fc->add_option("--stations", stations, "Station rule");
  fc->add_option("--options", options, "Model options as JSON or @file");
  fc->add_option("--model", model, "lasso, vanilla, recency or vanilla-5y")->capture_default_str();
  fc->add_option("--kind", kind, "month-ahead or year-ahead")->capture_default_str();
  fc->add_option("--cutoff", cutoff, "Last history day YYYY-MM-DD")->required();
  fc->add_option("--paths", paths, "Bootstrap paths")->capture_default_str()->check(CLI::PositiveNumber);
  fc->add_option("--seed", seed, "Master seed")->capture_default_str();
  fc->add_option("--out", out, "Quantile CSV path")->required();
  fc->add_option("--report", report, "Fit report path");

  std::string forecast_csv;
  auto* ev = app.add_subcommand("evaluate", "Score a quantile CSV against actuals");
  ev->add_option("--forecast", forecast_csv, "Quantile CSV")->required()->check(CLI::ExistingFile);
  ev->add_option("--actuals", data, "Hourly CSV with the observed load")->required()->check(CLI::ExistingFile);
  ev->add_option("--stations", stations, "Station rule");

  std::string config, set;
  std::vector<std::string> models;
  std::optional<std::uint64_t> run_seed;
  std::optional<std::size_t> run_paths;
  std::optional<unsigned> run_threads, run_parallel;
  bool validate_only = false;
  auto* run = app.add_subcommand("run", "Run every task of a JSON config");
  run->add_option("config", config, "Config file")->required()->check(CLI::ExistingFile);
  run->add_option("--set", set, "JSON object merged over the config");
  run->add_option("--seed", run_seed, "Override the master seed");
  run->add_option("--paths", run_paths, "Override the bootstrap paths")->check(CLI::PositiveNumber);
  run->add_option("--model", models, "Override the models (repeatable)");
  run->add_option("--out", out, "Override the output directory");
  run->add_option("--threads", run_threads, "Simulation threads per task")->check(CLI::PositiveNumber);
  run->add_option("--parallel-tasks", run_parallel, "Tasks in flight")->check(CLI::PositiveNumber);
  run->add_flag("--validate", validate_only, "Only check the config");

  bool no_pairs = false;
  auto* rank = app.add_subcommand("rank-stations", "Rank weather stations by cubic-fit residuals");
  rank->add_option("--data", data, "Hourly CSV")->required()->check(CLI::ExistingFile);
  rank->add_option("--cutoff", cutoff, "Last day used YYYY-MM-DD");
  rank->add_flag("--no-pairs", no_pairs, "Skip pair averages");
  rank->add_option("--out", out, "Output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitValidation;
  }
  if (verbose) lc_set_log_callback(log_to_stderr, nullptr);

  const char* rule = stations.empty() ? nullptr : stations.c_str();
  try {
    if (*fit) {
      const std::string opt = json_arg(options);
      Series s;
      check(lc_series_load_csv(data.c_str(), rule, &s.p), "reading " + data);
      Model m;
      check(lc_model_fit(s.p, opt.empty() ? nullptr : opt.c_str(), cutoff.empty() ? nullptr : cutoff.c_str(), &m.p),
            "fitting");
      Text t;
      check(lc_model_report(m.p, &t.p), "report");
      emit(t.str(), out);
    } else if (*fc) {
      const std::string opt = json_arg(options);
      Series s;
      check(lc_series_load_csv(data.c_str(), rule, &s.p), "reading " + data);
      Quantiles q;
      Text t;
      check(lc_task_forecast(s.p, opt.empty() ? nullptr : opt.c_str(), model.c_str(), kind.c_str(), cutoff.c_str(),
                             paths, seed, &q.p, report.empty() ? nullptr : &t.p),
            "forecasting");
      check(lc_quantiles_write_csv(q.p, out.c_str()), "writing " + out);
      if (!report.empty()) emit(t.str(), report);
    } else if (*ev) {
      Quantiles q;
      check(lc_quantiles_read_csv(forecast_csv.c_str(), &q.p), "reading " + forecast_csv);
      Series s;
      check(lc_series_load_csv(data.c_str(), rule, &s.p), "reading " + data);
      Text t;
      check(lc_evaluate(q.p, s.p, &t.p), "evaluating");
      emit(t.str(), "");
    } else if (*run) {
      nlohmann::json patch = nlohmann::json::object();
      if (!set.empty()) {
        try {
          patch = nlohmann::json::parse(json_arg(set));
        } catch (const nlohmann::json::exception& e) {
          std::cerr << "loadcast: --set: " << e.what() << "\n";
          return kExitValidation;
        }
        if (!patch.is_object()) {
          std::cerr << "loadcast: --set must be a JSON object\n";
          return kExitValidation;
        }
      }
      if (run_seed) patch["seed"] = *run_seed;
      if (run_paths) patch["paths"] = *run_paths;
      if (!models.empty()) patch["models"] = models;
      if (!out.empty()) patch["out"] = out;
      if (run_threads) patch["threads"] = *run_threads;
      if (run_parallel) patch["parallel_tasks"] = *run_parallel;
      const std::string overrides = patch.dump();
      if (validate_only) {
        check(lc_validate_config(config.c_str(), overrides.c_str()), "config");
        std::cout << "config ok\n";
        return 0;
      }
      Text summary;
      std::size_t failures = 0;
      check(lc_run(config.c_str(), overrides.c_str(), &summary.p, &failures), "run");
      std::cout << summary.str();
      if (failures) {
        std::cerr << "loadcast: " << failures << " task(s) failed\n";
        return kExitRuntime;
      }
    } else if (*rank) {
      Text t;
      check(lc_rank_stations(data.c_str(), cutoff.empty() ? nullptr : cutoff.c_str(), no_pairs ? 0 : 1, &t.p),
            "ranking");
      emit(t.str(), out);
    }
  } catch (const Failed& f) {
    return f.code;
  }
  return 0;
}
