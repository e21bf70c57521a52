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

#include "runner.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <json.hpp>
#include <map>
#include <mutex>
#include <set>
#include <thread>

#include "error.hpp"
#include "fileio.hpp"
#include "model.hpp"
#include "rng.hpp"

namespace loadcast {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

[[noreturn]] void bad(const std::string& what) { fail(ErrorKind::InvalidArgument, "config: " + what); }

void check_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) bad(where + " must be an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || it.key() == a;
    if (!ok) {
      std::string list;
      for (const char* a : allowed) list += std::string(list.empty() ? "" : ", ") + a;
      bad("unknown key '" + it.key() + "' in " + where + " (expected one of: " + list + ")");
    }
  }
}

std::string resolve(const std::string& base, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() ? p : (fs::path(base) / path).lexically_normal().string();
}

std::string must_exist(const std::string& base, const json& v, const std::string& key) {
  if (!v.is_string()) bad(key + " must be a path string");
  const std::string p = resolve(base, v.get<std::string>());
  if (!fs::exists(p)) bad(key + ": file '" + p + "' does not exist");
  return p;
}

template <class T>
T number(const json& v, const std::string& key, T lo, T hi) {
  if (!v.is_number()) bad(key + " must be a number");
  if constexpr (std::is_integral_v<T>) {
    if (!v.is_number_integer()) bad(key + " must be an integer");
    const bool out = v.is_number_unsigned()
                         ? (v.get<std::uint64_t>() < static_cast<std::uint64_t>(lo) ||
                            v.get<std::uint64_t>() > static_cast<std::uint64_t>(hi))
                         : (v.get<std::int64_t>() < static_cast<std::int64_t>(lo) ||
                            v.get<std::int64_t>() > static_cast<std::int64_t>(hi));
    if (out) {
      bad(key + " must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    }
    return v.is_number_unsigned() ? static_cast<T>(v.get<std::uint64_t>()) : static_cast<T>(v.get<std::int64_t>());
  } else {
    const T x = v.get<T>();
    if (!(x >= lo && x <= hi)) bad(key + " must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return x;
  }
}

StationRule station_rule(const json& v, const std::string& key) {
  if (!v.is_string()) bad(key + " must be a station rule such as \"avg:3,9\" or \"avg:all\"");
  try {
    return StationRule::parse(v.get<std::string>());
  } catch (const Error& e) {
    bad(key + ": " + e.what());
  }
}

std::vector<TaskSpec> parse_tasks(const json& v) {
  std::vector<TaskSpec> out;
  auto group = [&](const json& g) {
    check_keys(g, "tasks entry", {"kind", "cutoffs", "cutoff"});
    if (!g.contains("kind") || !g["kind"].is_string()) bad("every tasks entry needs \"kind\": \"month-ahead\" or \"year-ahead\"");
    const auto kind = parse_task_kind(g["kind"].get<std::string>());
    if (!kind) bad("unknown task kind '" + g["kind"].get<std::string>() + "' (month-ahead or year-ahead)");
    std::vector<json> cuts;
    if (g.contains("cutoff")) cuts.push_back(g["cutoff"]);
    if (g.contains("cutoffs")) {
      if (!g["cutoffs"].is_array()) bad("tasks cutoffs must be an array of dates");
      for (const auto& c : g["cutoffs"]) cuts.push_back(c);
    }
    if (cuts.empty()) bad("tasks entry without cutoffs");
    for (const auto& c : cuts) {
      if (!c.is_string()) bad("cutoff dates must be strings YYYY-MM-DD");
      try {
        out.push_back({*kind, parse_date(c.get<std::string>())});
      } catch (const Error& e) {
        bad(e.what());
      }
    }
  };
  if (v.is_array()) {
    for (const auto& g : v) group(g);
  } else {
    group(v);
  }
  if (out.empty()) bad("no tasks");
  for (std::size_t i = 1; i < out.size(); ++i) {
    if (std::chrono::sys_days{out[i].cutoff} <= std::chrono::sys_days{out[i - 1].cutoff}) {
      bad("cutoffs must be strictly increasing: " + out[i].name() + " does not follow " + out[i - 1].name());
    }
  }
  return out;
}


// Keys shared by run configs and the model options of the C API.
std::optional<Dataset> apply_model_options(const json& j, const std::string& base_dir, ModelOptions& m) {
  std::optional<Dataset> ds;
  if (j.contains("dataset")) {
    if (!j["dataset"].is_string() || !(ds = parse_dataset(j["dataset"].get<std::string>())))
      bad("dataset must be \"gefcom-l\" or \"gefcom-e\"");
  }
  m.spec = default_spec(ds.value_or(Dataset::GefcomL));
  if (j.contains("spec")) {
    try {
      if (j["spec"].is_string()) {
        m.spec = load_spec_file(must_exist(base_dir, j["spec"], "spec"));
      } else if (j["spec"].is_object()) {
        json s = j["spec"];
        if (ds && !s.contains("dataset")) s["dataset"] = j["dataset"];
        m.spec = spec_from_json(s.dump());
      } else {
        bad("spec must be a path or an inline object");
      }
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::InvalidArgument && std::string(e.what()).rfind("config:", 0) == 0) throw;
      bad(std::string("spec: ") + e.what());
    }
  }
  try {
    m.spec.validate();
  } catch (const Error& e) {
    bad(std::string("spec: ") + e.what());
  }

  if (j.contains("holidays")) {
    const std::string p = must_exist(base_dir, j["holidays"], "holidays");
    try {
      m.holidays = HolidayCalendar::load_file(p);
    } catch (const Error& e) {
      bad(std::string("holidays: ") + e.what());
    }
  }
  if (j.contains("lambda_grid")) {
    const auto& g = j["lambda_grid"];
    check_keys(g, "lambda_grid", {"size", "floor", "tol"});
    if (g.contains("size")) m.lasso.grid_size = number<std::size_t>(g["size"], "lambda_grid.size", 1, 100000);
    if (g.contains("floor")) m.lasso.grid_floor = number<double>(g["floor"], "lambda_grid.floor", 1e-12, 1.0);
    if (g.contains("tol")) m.lasso.cd.tol = number<double>(g["tol"], "lambda_grid.tol", 1e-16, 1.0);
  }
  if (j.contains("benchmark")) {
    const auto& b = j["benchmark"];
    check_keys(b, "benchmark", {"training_months", "weather_years", "form", "max_j", "max_k"});
    if (b.contains("training_months"))
      m.benchmark.training_months = number<int>(b["training_months"], "benchmark.training_months", 1, 1200);
    if (b.contains("weather_years")) {
      if (!b["weather_years"].is_array()) bad("benchmark.weather_years must be a list of years");
      for (const auto& y : b["weather_years"])
        m.benchmark.weather_years.push_back(number<int>(y, "benchmark.weather_years", 1900, 2200));
      std::set<int> uniq(m.benchmark.weather_years.begin(), m.benchmark.weather_years.end());
      if (uniq.size() != m.benchmark.weather_years.size()) bad("benchmark.weather_years has duplicates");
    }
    if (b.contains("max_j")) m.benchmark.max_j = number<int>(b["max_j"], "benchmark.max_j", 0, 30);
    if (b.contains("max_k")) m.benchmark.max_k = number<int>(b["max_k"], "benchmark.max_k", 0, 500);
    if (b.contains("form")) {
      check_keys(b["form"], "benchmark.form", {"J", "K"});
      MlrForm f;
      if (b["form"].contains("J")) f.J = number<int>(b["form"]["J"], "benchmark.form.J", 0, 30);
      if (b["form"].contains("K")) f.K = number<int>(b["form"]["K"], "benchmark.form.K", 0, 500);
      m.benchmark.form = f;
    }
  }
  return ds;
}

}  // namespace

std::optional<ModelKind> parse_model_kind(std::string_view name) {
  if (name == "lasso") return ModelKind::Lasso;
  if (name == "vanilla") return ModelKind::Vanilla;
  if (name == "recency") return ModelKind::Recency;
  if (name == "vanilla-5y" || name == "vanilla_5y") return ModelKind::Vanilla5y;
  return std::nullopt;
}

std::string model_kind_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::Lasso: return "lasso";
    case ModelKind::Vanilla: return "vanilla";
    case ModelKind::Recency: return "recency";
    case ModelKind::Vanilla5y: return "vanilla-5y";
  }
  return "?";
}

std::chrono::year_month_day parse_date(std::string_view text) {
  const auto c = text.size() == 10 ? parse_timestamp(text) : std::nullopt;
  if (!c) fail(ErrorKind::InvalidArgument, "malformed date '" + std::string(text) + "' (expected YYYY-MM-DD)");
  using namespace std::chrono;
  return year{c->year} / month{c->month} / day{c->day};
}

std::string TaskSpec::name() const {
  const TaskWindow w = task_window(kind, cutoff);
  const std::string date = format_date(w.first);
  if (kind == TaskKind::MonthAhead) return w.first.day == 1 ? date.substr(0, 7) : date;
  return w.first.day == 1 && w.first.month == 1 ? date.substr(0, 4) : date + "_year";
}

RunConfig parse_run_config(std::string_view json_text, const std::string& base_dir, std::string_view overrides) {
  json j;
  try {
    j = json::parse(json_text);
    if (!overrides.empty()) j.merge_patch(json::parse(overrides));
  } catch (const json::exception& e) {
    fail(ErrorKind::Parse, std::string("config: ") + e.what());
  }
  check_keys(j, "config", {"data", "stations", "models", "dataset", "spec", "holidays", "tasks", "seed", "paths",
                           "threads", "parallel_tasks", "out", "lambda_grid", "benchmark"});
  RunConfig c;
  if (!j.contains("data")) bad("missing \"data\": path to the hourly CSV");
  c.data = must_exist(base_dir, j["data"], "data");
  ModelOptions m;
  const std::optional<Dataset> ds = apply_model_options(j, base_dir, m);
  c.spec = std::move(m.spec);
  c.holidays = std::move(m.holidays);
  c.lasso = m.lasso;
  c.benchmark = std::move(m.benchmark);

  const bool gefcom_l = ds.value_or(Dataset::GefcomE) == Dataset::GefcomL && j.contains("dataset");
  c.lasso_stations = StationRule::parse(gefcom_l ? "avg:3,9" : "avg:all");
  c.benchmark_stations = StationRule::parse("avg:all");
  if (j.contains("stations")) {
    const auto& s = j["stations"];
    if (s.is_string()) {
      c.lasso_stations = c.benchmark_stations = station_rule(s, "stations");
    } else {
      check_keys(s, "stations", {"lasso", "benchmark"});
      if (s.contains("lasso")) c.lasso_stations = station_rule(s["lasso"], "stations.lasso");
      if (s.contains("benchmark")) c.benchmark_stations = station_rule(s["benchmark"], "stations.benchmark");
    }
  }

  if (j.contains("models")) {
    const auto& m = j["models"];
    std::vector<json> items;
    if (m.is_string()) items.push_back(m);
    else if (m.is_array()) items.assign(m.begin(), m.end());
    else bad("models must be a name or a list of names");
    c.models.clear();
    for (const auto& x : items) {
      const auto k = x.is_string() ? parse_model_kind(x.get<std::string>()) : std::nullopt;
      if (!k) bad("unknown model " + x.dump() + " (lasso, vanilla, recency, vanilla-5y)");
      if (std::find(c.models.begin(), c.models.end(), *k) != c.models.end()) bad("model " + x.dump() + " listed twice");
      c.models.push_back(*k);
    }
    if (c.models.empty()) bad("models is empty");
  }

  if (!j.contains("tasks")) bad("missing \"tasks\": [{\"kind\": \"month-ahead\", \"cutoffs\": [...]}]");
  c.tasks = parse_tasks(j["tasks"]);

  if (j.contains("seed")) c.seed = number<std::uint64_t>(j["seed"], "seed", 0, UINT64_MAX);
  if (j.contains("paths")) c.paths = number<std::size_t>(j["paths"], "paths", 1, 100000000);
  if (j.contains("threads")) c.threads = number<unsigned>(j["threads"], "threads", 1, 1024);
  if (j.contains("parallel_tasks")) c.parallel_tasks = number<unsigned>(j["parallel_tasks"], "parallel_tasks", 1, 1024);
  if (j.contains("out")) {
    if (!j["out"].is_string() || j["out"].get<std::string>().empty()) bad("out must be a directory path");
    c.out = resolve(base_dir, j["out"].get<std::string>());
  } else {
    c.out = resolve(base_dir, c.out);
  }
  return c;
}

ModelOptions parse_model_options(std::string_view json_text, const std::string& base_dir) {
  json j;
  try {
    j = json::parse(json_text.empty() ? std::string_view("{}") : json_text);
  } catch (const json::exception& e) {
    fail(ErrorKind::Parse, std::string("options: ") + e.what());
  }
  check_keys(j, "options", {"dataset", "spec", "holidays", "lambda_grid", "benchmark"});
  ModelOptions m;
  apply_model_options(j, base_dir, m);
  return m;
}

RunConfig load_run_config(const std::string& path, std::string_view overrides) {
  if (!fs::exists(path)) fail(ErrorKind::InvalidArgument, "config file '" + path + "' does not exist");
  const std::string text = read_text_file(path);
  const fs::path parent = fs::path(path).parent_path();
  return parse_run_config(text, parent.empty() ? "." : parent.string(), overrides);
}

std::uint64_t task_seed(std::uint64_t seed, const TaskSpec& task) {
  return derive_seed(seed, "lasso/" + task_kind_name(task.kind) + "/" + task.name());
}

std::size_t RunResult::failures() const {
  return static_cast<std::size_t>(std::count_if(outcomes.begin(), outcomes.end(), [](const auto& o) { return !o.ok; }));
}

std::string RunResult::summary_json() const {
  nlohmann::ordered_json j;
  j["failures"] = failures();
  auto& arr = j["tasks"] = nlohmann::ordered_json::array();
  for (const auto& o : outcomes) {
    nlohmann::ordered_json t;
    t["task"] = o.task;
    t["model"] = o.model;
    t["status"] = o.ok ? "ok" : "failed";
    if (!o.ok) t["error"] = o.error;
    if (!o.forecast_path.empty()) t["forecast"] = o.forecast_path;
    if (o.score) {
      t["pinball"] = o.score->pinball;
      t["mape"] = o.score->mape;
      t["hours"] = o.score->hours;
      t["missing"] = o.score->missing;
    }
    arr.push_back(std::move(t));
  }
  return j.dump(2) + "\n";
}

QuantileForecast forecast_task(const HourlySeries& series, const ModelOptions& options, const TaskRequest& request,
                               std::string* report, const SelectJk& select) {
  const TaskSpec& task = request.task;
  QuantileForecast qf;
  if (request.model == ModelKind::Lasso) {
    TaskForecastOptions opt;
    opt.fit.lasso = options.lasso;
    opt.sim.n_paths = request.paths;
    opt.sim.seed = task_seed(request.seed, task);
    opt.sim.threads = request.threads;
    BivariateModel fitted;
    qf = rolling_task_forecast(series, options.spec, options.holidays, task.kind, task.cutoff, opt, &fitted);
    if (report) *report = fit_report_json(fitted);
  } else {
    BenchmarkOptions opt = options.benchmark;
    std::optional<JkSelection> sel;
    if (request.model == ModelKind::Recency && !opt.form) {
      const int year = static_cast<int>(task_window(task.kind, task.cutoff).first.year);
      const HourlySeries history = series.truncated(static_cast<std::size_t>(cutoff_end(series.grid(), task.cutoff)));
      sel = select ? select(history, year, opt.max_j, opt.max_k) : select_jk(history, year, opt.max_j, opt.max_k);
      opt.form = MlrForm{sel->J, sel->K};
    }
    const BenchmarkKind bk = request.model == ModelKind::Vanilla   ? BenchmarkKind::Vanilla
                             : request.model == ModelKind::Recency ? BenchmarkKind::Recency
                                                                   : BenchmarkKind::Vanilla5y;
    BenchmarkReport rep;
    qf = benchmark_task_forecast(series, bk, task.kind, task.cutoff, opt, &rep);
    if (sel) rep.selection = sel;
    if (report) *report = benchmark_report_json(rep);
  }
  qf.validate();
  return qf;
}

RunResult run_tasks(const RunConfig& config) {
  const RawTable table = read_csv(config.data);
  const bool need_lasso = std::find(config.models.begin(), config.models.end(), ModelKind::Lasso) != config.models.end();
  const bool need_bench = std::any_of(config.models.begin(), config.models.end(), [](ModelKind k) { return k != ModelKind::Lasso; });
  HourlySeries lasso_series, bench_series;
  if (need_lasso) lasso_series = virtual_series(table, config.lasso_stations);
  if (need_bench) bench_series = virtual_series(table, config.benchmark_stations);

  const std::size_t nm = config.models.size();
  std::vector<TaskOutcome> outcomes(config.tasks.size() * nm);
  std::mutex selection_mutex;
  std::map<int, JkSelection> selections;
  const SelectJk cached_select = [&](const HourlySeries& history, int year, int max_j, int max_k) {
    std::lock_guard<std::mutex> lock(selection_mutex);
    auto it = selections.find(year);
    if (it == selections.end()) it = selections.emplace(year, select_jk(history, year, max_j, max_k)).first;
    return it->second;
  };
  ModelOptions options;
  options.spec = config.spec;
  options.holidays = config.holidays;
  options.lasso = config.lasso;
  options.benchmark = config.benchmark;

  auto run_one = [&](std::size_t ti, std::size_t mi) {
    const TaskSpec& task = config.tasks[ti];
    const ModelKind kind = config.models[mi];
    TaskOutcome& o = outcomes[ti * nm + mi];
    o.task = task.name();
    o.model = model_kind_name(kind);
    try {
      log(LogLevel::Info, "task " + o.task + " model " + o.model);
      const HourlySeries& series = kind == ModelKind::Lasso ? lasso_series : bench_series;
      std::string report;
      const QuantileForecast qf = forecast_task(series, options, {kind, task, config.paths, config.seed, config.threads},
                                                &report, cached_select);
      const fs::path dir = fs::path(config.out) / o.model;
      o.forecast_path = o.model + "/" + o.task + ".csv";
      write_file_atomic((dir / (o.task + ".csv")).string(), qf.to_csv());
      write_file_atomic((dir / (o.task + ".json")).string(), report + "\n");
      const auto sc = score_task(o.task, o.model, qf, series);
      if (sc.hours > 0) o.score = sc;
      o.ok = true;
    } catch (const std::exception& e) {
      o.ok = false;
      o.error = e.what();
      log(LogLevel::Warning, "task " + o.task + " model " + o.model + " failed: " + o.error);
    }
  };

  const unsigned workers = std::min<unsigned>(config.parallel_tasks, static_cast<unsigned>(config.tasks.size()));
  if (workers <= 1) {
    for (std::size_t t = 0; t < config.tasks.size(); ++t)
      for (std::size_t m = 0; m < nm; ++m) run_one(t, m);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t t; (t = next++) < config.tasks.size();)
          for (std::size_t m = 0; m < nm; ++m) run_one(t, m);
      });
    }
    for (auto& th : pool) th.join();
  }

  RunResult result;
  result.outcomes = std::move(outcomes);
  for (const auto& o : result.outcomes)
    if (o.score) result.scores.push_back(*o.score);
  std::string text = result.scores.empty() ? std::string("no scored tasks\n") : score_table(result.scores);
  for (const auto& o : result.outcomes)
    if (!o.ok) text += "FAILED " + o.task + " " + o.model + ": " + o.error + "\n";
  write_file_atomic((fs::path(config.out) / "scores.csv").string(), score_csv(result.scores));
  write_file_atomic((fs::path(config.out) / "scores.txt").string(), text);
  write_file_atomic((fs::path(config.out) / "run.json").string(), result.summary_json());
  return result;
}

}  // namespace loadcast
