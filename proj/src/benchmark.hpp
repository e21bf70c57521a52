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

// Multiple-linear-regression benchmarks: the Vanilla calendar/temperature
// model, its Recency extension, (J,K) selection and weather-scenario
// quantiles.

#ifndef LOADCAST_BENCHMARK_HPP
#define LOADCAST_BENCHMARK_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "forecast.hpp"
#include "series.hpp"

namespace loadcast {

/// Mean of the 24 hourly temperatures t-24j .. t-24j+23, j >= 1.
double daily_moving_avg_temp(std::span<const double> temperature, std::int64_t t, int j);

/// J daily moving averages and K hourly temperature lags on top of the
/// Vanilla terms; (0, 0) is Vanilla.
struct MlrForm {
  int J = 0;
  int K = 0;

  static constexpr std::size_t kVanillaColumns = 284;
  static constexpr std::size_t kTemperatureBlock = 105;  // f(x): x^p plain, x MoY, x HoD

  std::size_t columns() const;
  /// Hours of temperature history needed before a row.
  int lookback() const { return 24 * J > K ? 24 * J : K; }
  bool operator==(const MlrForm&) const = default;
};

/// Polynomials are evaluated in (T - center) / scale.
struct TempScale {
  double center = 0.0;
  double scale = 1.0;
};

/// One design row. `temp` points at T_t; temp[-k] must be valid for
/// k <= form.lookback().
void mlr_row(const MlrForm& form, const HourStamp& stamp, const double* temp, const TempScale& scale,
             double* out);

std::vector<std::string> mlr_column_names(const MlrForm& form);

struct MlrModel {
  MlrForm form;
  TempScale scale;
  std::vector<double> coefficients;
  std::int64_t begin = 0;  // training window [begin, end) on the series grid
  std::int64_t end = 0;
  std::size_t rows = 0;
  std::size_t rank = 0;
  double rss = 0.0;
};

struct MlrOptions {
  std::optional<TempScale> scale;  // default: mean and sd of training temperatures
};

/// Least squares on the training window; rank deficiency is resolved by the
/// minimum-norm solution. Hours with missing load or needed temperatures are
/// skipped.
MlrModel fit_mlr(const HourlySeries& series, const MlrForm& form, std::int64_t begin, std::int64_t end,
                 const MlrOptions& options = {});

/// Predictions for hours [begin, end) of `grid`, with temperatures indexed
/// on the same grid.
std::vector<double> predict_mlr(const MlrModel& model, const HourGrid& grid, std::span<const double> temperature,
                                std::int64_t begin, std::int64_t end);

struct JkSelection {
  int J = 0;
  int K = 0;
  double mape = 0.0;
  int max_j = 7;
  int max_k = 48;
  std::vector<double> grid_mape;  // [J * (max_k + 1) + K]
};

/// Trains on calendar years target-3 and target-2 and minimizes validation
/// MAPE on year target-1, with observed temperatures. Ties go to smaller J
/// then smaller K.
JkSelection select_jk(const HourlySeries& series, int target_year, int max_j = 7, int max_k = 48);

/// First hour of the training window spanning `months` whole months before
/// the forecast start.
std::int64_t training_begin(const HourGrid& grid, const CivilHour& first, int months);

/// Weather years whose temperatures, shifted by whole years onto
/// [first, first + hours), lie wholly before `first` and are observed.
std::vector<int> available_weather_years(const HourlySeries& series, const CivilHour& first, std::size_t hours);

/// One point forecast per weather year, then per-hour empirical quantiles.
/// Temperatures before `first` come from the series.
QuantileForecast scenario_quantiles(const MlrModel& model, const HourlySeries& series, const CivilHour& first,
                                    std::size_t hours, const std::vector<int>& weather_years);

/// Scenario forecasts, [scenario][hour].
std::vector<std::vector<double>> scenario_forecasts(const MlrModel& model, const HourlySeries& series,
                                                    const CivilHour& first, std::size_t hours,
                                                    const std::vector<int>& weather_years);

enum class BenchmarkKind { Vanilla, Recency, Vanilla5y };

struct BenchmarkOptions {
  int training_months = 24;  // Vanilla5y overrides with 60
  std::vector<int> weather_years;  // empty: all available
  std::optional<MlrForm> form;     // skip the Recency search
  int max_j = 7;
  int max_k = 48;
};

struct BenchmarkReport {
  MlrModel model;
  std::vector<int> weather_years;
  std::optional<JkSelection> selection;
};

QuantileForecast benchmark_task_forecast(const HourlySeries& series, BenchmarkKind kind, TaskKind task,
                                         std::chrono::year_month_day cutoff, const BenchmarkOptions& options,
                                         BenchmarkReport* report = nullptr);

std::string benchmark_report_json(const BenchmarkReport& report);

}  // namespace loadcast

#endif  // LOADCAST_BENCHMARK_HPP
