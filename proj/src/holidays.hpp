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

#ifndef LOADCAST_HOLIDAYS_HPP
#define LOADCAST_HOLIDAYS_HPP

#include <chrono>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "timegrid.hpp"

namespace loadcast {

struct HolidayRule {
  enum class Kind { Fixed, Flexible };

  Kind kind = Kind::Fixed;
  std::string name;
  unsigned month = 1;
  unsigned day = 1;      // fixed rules
  unsigned weekday = 0;  // flexible rules, 0 = Sunday
  int ordinal = 1;       // flexible rules, 1..5 or -1 for the last one

  static HolidayRule fixed(unsigned month, unsigned day, std::string name);
  static HolidayRule flexible(unsigned month, unsigned weekday, int ordinal, std::string name);

  /// Calendar date of the rule in the given year. Empty when the rule does not
  /// occur that year (Feb 29 in a common year, a fifth weekday that is absent).
  std::optional<std::chrono::year_month_day> resolve(int year) const;
};

/// Fixed-date and rule-based public holidays.
///
/// Text format, one rule per line, '#' starts a comment:
///
///     FIX <month>-<day> <name>
///     FLEX <month> <weekday> <ordinal> <name>
///
/// The weekday is a name (Sun, Monday, ...) or 0..6 with 0 = Sunday; ordinal
/// -1 selects the last such weekday of the month.
class HolidayCalendar {
 public:
  HolidayCalendar() = default;
  explicit HolidayCalendar(std::vector<HolidayRule> rules);

  /// United States federal public holidays as observed through 2020.
  static HolidayCalendar us_federal();
  static HolidayCalendar parse(std::string_view text);
  static HolidayCalendar load_file(const std::string& path);

  const std::vector<HolidayRule>& rules() const { return rules_; }
  std::vector<HolidayRule> fixed() const;
  std::vector<HolidayRule> flexible() const;
  bool empty() const { return rules_.empty(); }

  /// Resolved dates of every rule in `year`, in rule order (absent entries
  /// skipped). Throws Data when a fixed and a flexible rule share a date.
  std::vector<std::chrono::year_month_day> dates_in_year(int year) const;
  bool is_holiday(std::chrono::year_month_day d) const;

  std::string to_text() const;

 private:
  std::vector<HolidayRule> rules_;
};

/// Position 1..36 of `t` in the window running from 18:00 on the day before
/// `holiday` through 05:00 on the day after it.
std::optional<int> holiday_window(const HourStamp& t, std::chrono::year_month_day holiday);

/// Mean load per hour of the week over the hours of `load` in [0, end),
/// skipping Sunday-to-Saturday weeks that contain a holiday. Falls back to all
/// weeks when that leaves an hour of the week without observations. NaN marks
/// a missing value.
WeekProfile weekly_mean_profile(const HourGrid& grid, std::span<const double> load,
                                std::int64_t end, const HolidayCalendar& calendar);

}  // namespace loadcast

#endif  // LOADCAST_HOLIDAYS_HPP
