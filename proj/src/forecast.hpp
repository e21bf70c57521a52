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

#ifndef LOADCAST_FORECAST_HPP
#define LOADCAST_FORECAST_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "model.hpp"

namespace loadcast {

inline constexpr int kQuantileLevels = 99;
using QuantileRow = std::array<double, kQuantileLevels>;

/// 99 quantile estimates (levels 1..99 percent) per forecast hour.
struct QuantileForecast {
  CivilHour start;
  std::vector<QuantileRow> rows;

  std::size_t hours() const { return rows.size(); }
  /// Throws Data when a row is non-monotone or non-finite.
  void validate() const;

  /// `timestamp,q1,...,q99`, values in shortest round-trip form.
  std::string to_csv() const;
  static QuantileForecast from_csv(std::string_view text, const std::string& source = "<input>");
  static QuantileForecast read_csv(const std::string& path);
};

/// Inverse empirical distribution function: the ceil(N * level / 100)-th
/// order statistic. `sorted` must be ascending and non-empty.
double empirical_quantile(std::span<const double> sorted, int level);
/// Sorts `values` in place and fills all 99 levels.
QuantileRow quantile_row(std::span<double> values);

struct SimulationConfig {
  std::size_t n_paths = 10000;
  std::size_t horizon = 0;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  // Residual pools; empty means the in-sample residuals of the fit.
  std::vector<double> load_residuals;
  std::vector<double> temperature_residuals;
};

/// Per-hour evaluation of one equation over a forecast horizon: the intercept
/// part and each lag's coefficient are resolved once per hour.
struct CompiledEquation {
  struct Term {
    Channel regressor = Channel::Load;
    double threshold = kNoThreshold;
    int lag = 1;
    double constant = 0.0;
    std::vector<double> varying;  // per hour, empty when time-invariant
    double at(std::size_t h) const { return varying.empty() ? constant : varying[h]; }
  };
  std::vector<double> base;  // per hour
  std::vector<Term> terms;
  int max_lag = 0;
};

/// Compiles `eq` for hours [start, start + horizon) of `grid`.
CompiledEquation compile(const EquationModel& eq, const HourGrid& grid, std::int64_t start,
                         std::size_t horizon);

/// Simulated load and temperature, value [h * n_paths + path].
struct PathEnsemble {
  std::size_t horizon = 0;
  std::size_t n_paths = 0;
  std::vector<double> load;
  std::vector<double> temperature;
};

/// Bootstrap paths continuing `history` (which must end where forecasting
/// starts). Temperature is simulated before load at every hour.
PathEnsemble simulate_paths(const BivariateModel& model, const HourlySeries& history,
                            const SimulationConfig& cfg);

/// Same simulation reduced to load quantiles hour by hour, without storing
/// the ensemble.
QuantileForecast simulate_quantiles(const BivariateModel& model, const HourlySeries& history,
                                    const SimulationConfig& cfg);

QuantileForecast quantiles_from_paths(const PathEnsemble& ensemble, const CivilHour& start,
                                      Channel channel = Channel::Load);

enum class TaskKind { MonthAhead, YearAhead };

std::optional<TaskKind> parse_task_kind(std::string_view s);
std::string task_kind_name(TaskKind k);

/// Forecast window after a cutoff day: history ends at 23:00 on `cutoff`.
struct TaskWindow {
  CivilHour first;  // first forecast hour
  std::size_t hours = 0;
};

/// Month-ahead runs through the end of the month holding the first forecast
/// hour; year-ahead covers the following twelve months.
TaskWindow task_window(TaskKind kind, std::chrono::year_month_day cutoff);

/// Index one past the cutoff day's last hour; throws Data if outside.
std::int64_t cutoff_end(const HourGrid& grid, std::chrono::year_month_day cutoff);

struct TaskForecastOptions {
  FitOptions fit;
  SimulationConfig sim;  // horizon is set from the task
};

/// Fits both equations on everything up to the cutoff and simulates the
/// task window.
QuantileForecast rolling_task_forecast(const HourlySeries& series, const ModelSpec& spec,
                                       const HolidayCalendar& calendar, TaskKind task,
                                       std::chrono::year_month_day cutoff,
                                       const TaskForecastOptions& options,
                                       BivariateModel* fitted = nullptr);

}  // namespace loadcast

#endif  // LOADCAST_FORECAST_HPP
