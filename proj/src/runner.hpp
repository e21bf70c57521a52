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

// End-to-end experiments: a JSON run configuration, rolling tasks over every
// requested model, and the artifacts they leave behind.

#ifndef LOADCAST_RUNNER_HPP
#define LOADCAST_RUNNER_HPP

#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "benchmark.hpp"
#include "evaluation.hpp"
#include "holidays.hpp"
#include "ingest.hpp"
#include "lasso.hpp"
#include "model_spec.hpp"

namespace loadcast {

enum class ModelKind { Lasso, Vanilla, Recency, Vanilla5y };

std::optional<ModelKind> parse_model_kind(std::string_view name);
std::string model_kind_name(ModelKind kind);

struct TaskSpec {
  TaskKind kind = TaskKind::MonthAhead;
  std::chrono::year_month_day cutoff;

  /// "2011-04" for a month starting on the 1st, "2011" for a year starting
  /// Jan 1, otherwise the first date plus the kind.
  std::string name() const;
};

std::chrono::year_month_day parse_date(std::string_view text);

struct RunConfig {
  std::string data;
  StationRule lasso_stations;
  StationRule benchmark_stations;
  std::vector<ModelKind> models{ModelKind::Lasso};
  ModelSpec spec;
  HolidayCalendar holidays = HolidayCalendar::us_federal();
  std::vector<TaskSpec> tasks;
  std::uint64_t seed = 1;
  std::size_t paths = 10000;
  unsigned threads = 1;         // simulation threads per task
  unsigned parallel_tasks = 1;  // tasks in flight
  std::string out = "out";
  LassoOptions lasso;
  BenchmarkOptions benchmark;
};

/// Model settings without data or tasks: dataset, spec, holidays,
/// lambda_grid and benchmark, with the same meaning as in a run config.
struct ModelOptions {
  ModelSpec spec = default_spec(Dataset::GefcomL);
  HolidayCalendar holidays = HolidayCalendar::us_federal();
  LassoOptions lasso;
  BenchmarkOptions benchmark;
};

ModelOptions parse_model_options(std::string_view json_text, const std::string& base_dir = ".");

/// Parses and validates a configuration. Relative paths resolve against
/// `base_dir`. `overrides` is a JSON object merged over the file (RFC 7396)
/// before validation. Every breach raises InvalidArgument or Parse before
/// any data is read.
RunConfig parse_run_config(std::string_view json_text, const std::string& base_dir = ".",
                           std::string_view overrides = {});
RunConfig load_run_config(const std::string& path, std::string_view overrides = {});

/// Sub-seed of the lasso simulation for one task.
std::uint64_t task_seed(std::uint64_t seed, const TaskSpec& task);

struct TaskRequest {
  ModelKind model = ModelKind::Lasso;
  TaskSpec task;
  std::size_t paths = 10000;
  std::uint64_t seed = 1;  // master seed; the lasso uses task_seed(seed, task)
  unsigned threads = 1;
};

/// Chooses (J, K) for a target year from history ending at the cutoff.
using SelectJk = std::function<JkSelection(const HourlySeries& history, int year, int max_j, int max_k)>;

/// One task for one model. `report` receives the fit report JSON. Without
/// `select`, Recency searches afresh unless options fix the form.
QuantileForecast forecast_task(const HourlySeries& series, const ModelOptions& options, const TaskRequest& request,
                               std::string* report = nullptr, const SelectJk& select = {});

struct TaskOutcome {
  std::string task;
  std::string model;
  bool ok = false;
  std::string error;
  std::string forecast_path;  // relative to RunConfig::out
  std::optional<TaskScore> score;
};

struct RunResult {
  std::vector<TaskOutcome> outcomes;  // task-major, models in config order
  std::vector<TaskScore> scores;
  std::size_t failures() const;
  std::string summary_json() const;
};

/// Writes <out>/<model>/<task>.csv and .json per task, then scores.csv,
/// scores.txt and run.json. A failing task is recorded and the rest go on.
RunResult run_tasks(const RunConfig& config);

}  // namespace loadcast

#endif  // LOADCAST_RUNNER_HPP
