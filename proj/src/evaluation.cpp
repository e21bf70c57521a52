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

#include "evaluation.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>

#include "error.hpp"

namespace loadcast {

namespace {

double nan() { return std::numeric_limits<double>::quiet_NaN(); }

std::string full(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::string two(double v) {
  if (std::isnan(v)) return "n/a";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::vector<double> actuals_for(const QuantileForecast& f, const HourlySeries& s) {
  const std::int64_t start = absolute_hour(f.start) - absolute_hour(s.grid().origin());
  if (start < 0) {
    fail(ErrorKind::Data, "forecast starting " + format_timestamp(f.start) + " begins before the actuals");
  }
  std::vector<double> a(f.hours(), nan());
  const auto load = s.load();
  for (std::size_t h = 0; h < a.size(); ++h) {
    const auto t = static_cast<std::size_t>(start) + h;
    if (t < load.size()) a[h] = load[t];
  }
  return a;
}

}  // namespace

double pinball_loss(const QuantileRow& q, double actual) {
  double sum = 0.0;
  for (int k = 0; k < kQuantileLevels; ++k) {
    const double tau = (k + 1) / 100.0;
    const double z = q[static_cast<std::size_t>(k)];
    sum += actual >= z ? tau * (actual - z) : (1.0 - tau) * (z - actual);
  }
  return sum / kQuantileLevels;
}

PinballScore pinball(const QuantileForecast& forecast, std::span<const double> actual) {
  if (actual.size() != forecast.hours()) {
    fail(ErrorKind::InvalidArgument, "pinball: " + std::to_string(forecast.hours()) + " forecast hours against " +
                                         std::to_string(actual.size()) + " actuals");
  }
  PinballScore s;
  double sum = 0.0;
  for (std::size_t h = 0; h < actual.size(); ++h) {
    if (std::isnan(actual[h])) {
      ++s.missing;
      continue;
    }
    sum += pinball_loss(forecast.rows[h], actual[h]);
    ++s.hours;
  }
  s.score = s.hours ? sum / static_cast<double>(s.hours) : nan();
  return s;
}

PinballScore pinball(const QuantileForecast& forecast, const HourlySeries& actuals) {
  const auto a = actuals_for(forecast, actuals);
  return pinball(forecast, a);
}

MapeScore mape(std::span<const double> predicted, std::span<const double> actual) {
  if (predicted.size() != actual.size()) {
    fail(ErrorKind::InvalidArgument, "mape: " + std::to_string(predicted.size()) + " predictions against " +
                                         std::to_string(actual.size()) + " actuals");
  }
  MapeScore s;
  double sum = 0.0;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    if (std::isnan(actual[i]) || std::isnan(predicted[i])) {
      ++s.missing;
    } else if (actual[i] == 0.0) {
      ++s.zero;
    } else {
      sum += std::abs(actual[i] - predicted[i]) / std::abs(actual[i]);
      ++s.hours;
    }
  }
  if (s.zero) log(LogLevel::Warning, "mape: " + std::to_string(s.zero) + " zero actuals excluded");
  s.mape = s.hours ? 100.0 * sum / static_cast<double>(s.hours) : nan();
  return s;
}

TaskScore score_task(const std::string& task, const std::string& model, const QuantileForecast& forecast,
                     const HourlySeries& actuals) {
  const auto a = actuals_for(forecast, actuals);
  const auto pb = pinball(forecast, a);
  std::vector<double> median(forecast.hours());
  for (std::size_t h = 0; h < median.size(); ++h) median[h] = forecast.rows[h][49];
  TaskScore s;
  s.task = task;
  s.model = model;
  s.pinball = pb.score;
  s.mape = mape(median, a).mape;
  s.hours = pb.hours;
  s.missing = pb.missing;
  return s;
}

std::string score_csv(const std::vector<TaskScore>& scores) {
  std::string out = "task,model,pinball,mape,hours,missing\n";
  for (const auto& s : scores) {
    out += s.task + "," + s.model + "," + full(s.pinball) + "," + full(s.mape) + "," + std::to_string(s.hours) + "," +
           std::to_string(s.missing) + "\n";
  }
  return out;
}

std::string score_table(const std::vector<TaskScore>& scores) {
  std::vector<std::string> tasks, models;
  auto add = [](std::vector<std::string>& v, const std::string& x) {
    if (std::find(v.begin(), v.end(), x) == v.end()) v.push_back(x);
  };
  for (const auto& s : scores) {
    add(tasks, s.task);
    add(models, s.model);
  }
  const std::size_t nt = tasks.size(), nm = models.size();
  std::vector<double> cell(nt * nm, nan());
  for (const auto& s : scores) {
    const auto t = static_cast<std::size_t>(std::find(tasks.begin(), tasks.end(), s.task) - tasks.begin());
    const auto m = static_cast<std::size_t>(std::find(models.begin(), models.end(), s.model) - models.begin());
    cell[t * nm + m] = s.pinball;
  }
  // Averages over the rounded cells so the printed row is reproducible by hand.
  std::vector<double> avg(nm, nan());
  for (std::size_t m = 0; m < nm; ++m) {
    double sum = 0.0;
    std::size_t k = 0;
    for (std::size_t t = 0; t < nt; ++t)
      if (!std::isnan(cell[t * nm + m])) {
        sum += std::round(cell[t * nm + m] * 100.0) / 100.0;
        ++k;
      }
    if (k) avg[m] = sum / static_cast<double>(k);
  }

  std::vector<std::vector<std::string>> grid;
  grid.push_back({"task"});
  for (const auto& m : models) grid[0].push_back(m);
  auto row = [&](const std::string& label, const double* v) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t m = 0; m < nm; ++m)
      if (!std::isnan(v[m])) best = std::min(best, std::round(v[m] * 100.0));
    std::vector<std::string> r{label};
    for (std::size_t m = 0; m < nm; ++m) {
      std::string c = two(v[m]);
      if (nm > 1) c += !std::isnan(v[m]) && std::round(v[m] * 100.0) == best ? "*" : " ";
      r.push_back(c);
    }
    grid.push_back(std::move(r));
  };
  for (std::size_t t = 0; t < nt; ++t) row(tasks[t], cell.data() + t * nm);
  row("average", avg.data());

  std::vector<std::size_t> width(nm + 1, 0);
  for (const auto& r : grid)
    for (std::size_t c = 0; c < r.size(); ++c) width[c] = std::max(width[c], r[c].size());
  std::string out;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (i == grid.size() - 1) {
      std::size_t total = 0;
      for (auto w : width) total += w + 2;
      out += std::string(total - 2, '-') + "\n";
    }
    const auto& r = grid[i];
    for (std::size_t c = 0; c < r.size(); ++c) {
      const std::string& s = r[c];
      if (c == 0) out += s + std::string(width[c] - s.size(), ' ');
      else out += "  " + std::string(width[c] - s.size(), ' ') + s;
    }
    out += "\n";
  }
  return out;
}

}  // namespace loadcast
