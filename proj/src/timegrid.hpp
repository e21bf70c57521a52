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

#ifndef LOADCAST_TIMEGRID_HPP
#define LOADCAST_TIMEGRID_HPP

#include <array>
#include <chrono>
#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace loadcast {

/// Wall-clock hour on a DST-free local grid.
struct CivilHour {
  int year = 1970;
  unsigned month = 1;  // 1..12
  unsigned day = 1;    // 1..31
  unsigned hour = 0;   // 0..23

  auto operator<=>(const CivilHour&) const = default;

  std::chrono::year_month_day date() const {
    return std::chrono::year{year} / std::chrono::month{month} /
           std::chrono::day{day};
  }
  bool ok() const { return hour < 24 && date().ok(); }
};

/// Hours since 1970-01-01 00:00 on the same local grid.
std::int64_t absolute_hour(const CivilHour& c);
CivilHour civil_from_absolute(std::int64_t hours);
CivilHour civil_from_date(std::chrono::year_month_day d, unsigned hour = 0);

/// Accepts "YYYY-MM-DD HH:MM[:SS]", the same with a 'T' separator, or a bare
/// "YYYY-MM-DD" (hour 0). Minutes and seconds must be zero.
std::optional<CivilHour> parse_timestamp(std::string_view text);
std::string format_timestamp(const CivilHour& c);  // "YYYY-MM-DD HH:00"
std::string format_date(const CivilHour& c);       // "YYYY-MM-DD"

struct HourStamp {
  std::int64_t index = 0;
  CivilHour wall;
};

/// Regular hourly grid anchored at the origin hour. stamp_of() extends past the
/// grid's length so forecast hours can be addressed with the same indexing.
class HourGrid {
 public:
  HourGrid() = default;
  HourGrid(CivilHour origin, std::size_t length);

  const CivilHour& origin() const { return origin_; }
  std::size_t size() const { return length_; }
  bool contains(std::int64_t index) const {
    return index >= 0 && index < static_cast<std::int64_t>(length_);
  }

  HourStamp stamp_of(std::int64_t index) const;
  std::optional<std::int64_t> index_of(const CivilHour& c) const;
  std::int64_t offset_of(const CivilHour& c) const;

 private:
  CivilHour origin_;
  std::int64_t origin_abs_ = 0;
  std::size_t length_ = 0;
};

int hour_of_day(const HourStamp& t);   // 1..24
int hour_of_week(const HourStamp& t);  // 1..168, 1 = Sunday 00:00
int day_of_year(const HourStamp& t);   // 1..365, Feb 29 shares 59 with Feb 28
int day_of_week(const HourStamp& t);   // 1..7, 1 = Sunday
int month_of_year(const HourStamp& t); // 1..12

unsigned weekday_index(std::chrono::year_month_day d);  // 0 = Sunday
bool is_leap_year(int year);
int day_of_year(std::chrono::year_month_day d);

using WeekProfile = std::array<double, 168>;

/// Effective holiday coefficient per hour of the week (index how - 1).
///
/// Sunday hours are 0 and Tuesday/Wednesday/Thursday hours are 1. Monday,
/// Friday and Saturday hours take 1 - (high - actual)/(high - low) clamped to
/// [0, 1], where high is the Tue/Wed/Thu mean at that hour of day and low is
/// the Sunday value. Throws Data when high == low at some hour.
WeekProfile effective_coefficients(const WeekProfile& mean_profile);

}  // namespace loadcast

#endif  // LOADCAST_TIMEGRID_HPP
