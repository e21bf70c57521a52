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

#ifndef LOADCAST_EVALUATION_HPP
#define LOADCAST_EVALUATION_HPP

#include <span>
#include <string>
#include <vector>

#include "forecast.hpp"
#include "series.hpp"

namespace loadcast {

/// Mean pinball loss of one hour over the 99 levels.
double pinball_loss(const QuantileRow& q, double actual);

struct PinballScore {
  double score = 0.0;  // NaN when no hour could be scored
  std::size_t hours = 0;
  std::size_t missing = 0;  // NaN actuals, excluded
};

/// `actual` holds one value per forecast hour; a length mismatch is an error.
PinballScore pinball(const QuantileForecast& forecast, std::span<const double> actual);

/// Actuals looked up by timestamp; hours past the end of the series count as
/// missing.
PinballScore pinball(const QuantileForecast& forecast, const HourlySeries& actuals);

struct MapeScore {
  double mape = 0.0;  // percent; NaN when nothing was scored
  std::size_t hours = 0;
  std::size_t zero = 0;     // zero actuals, excluded with a warning
  std::size_t missing = 0;  // NaN on either side
};

MapeScore mape(std::span<const double> predicted, std::span<const double> actual);

struct TaskScore {
  std::string task;
  std::string model;
  double pinball = 0.0;
  double mape = 0.0;  // of the median forecast
  std::size_t hours = 0;
  std::size_t missing = 0;
};

/// Pinball and median MAPE in one pass over the forecast span.
TaskScore score_task(const std::string& task, const std::string& model, const QuantileForecast& forecast,
                     const HourlySeries& actuals);

/// `task,model,pinball,mape,hours,missing` with full precision.
std::string score_csv(const std::vector<TaskScore>& scores);

/// Pinball per task (rows) and model (columns) to two decimals, an average
/// row, and '*' on the best entry of every row. Rows and columns keep first
/// appearance order.
std::string score_table(const std::vector<TaskScore>& scores);

}  // namespace loadcast

#endif  // LOADCAST_EVALUATION_HPP
