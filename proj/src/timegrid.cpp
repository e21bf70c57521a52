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

#include "timegrid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "error.hpp"

namespace loadcast {

using namespace std::chrono;

std::int64_t absolute_hour(const CivilHour& c) {
  const sys_days d{c.date()};
  return static_cast<std::int64_t>(d.time_since_epoch().count()) * 24 + c.hour;
}

CivilHour civil_from_date(year_month_day d, unsigned hour) {
  return CivilHour{static_cast<int>(d.year()), static_cast<unsigned>(d.month()),
                   static_cast<unsigned>(d.day()), hour};
}

CivilHour civil_from_absolute(std::int64_t hours) {
  std::int64_t days = hours / 24;
  std::int64_t hour = hours % 24;
  if (hour < 0) {
    hour += 24;
    days -= 1;
  }
  const year_month_day ymd{sys_days{std::chrono::days{days}}};
  return civil_from_date(ymd, static_cast<unsigned>(hour));
}

std::optional<CivilHour> parse_timestamp(std::string_view text) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r'))
    text.remove_suffix(1);
  const std::string s(text);
  int y = 0;
  unsigned mo = 0, d = 0, h = 0, mi = 0, sec = 0;
  int consumed = 0;
  CivilHour c;
  if (s.size() == 10) {
    if (std::sscanf(s.c_str(), "%4d-%2u-%2u%n", &y, &mo, &d, &consumed) != 3 ||
        consumed != 10)
      return std::nullopt;
  } else {
    if (s.size() < 16 || (s[10] != ' ' && s[10] != 'T')) return std::nullopt;
    const std::string date_part = s.substr(0, 10);
    const std::string time_part = s.substr(11);
    if (std::sscanf(date_part.c_str(), "%4d-%2u-%2u%n", &y, &mo, &d, &consumed) != 3 ||
        consumed != 10)
      return std::nullopt;
    if (time_part.size() == 5) {
      if (std::sscanf(time_part.c_str(), "%2u:%2u%n", &h, &mi, &consumed) != 2 ||
          consumed != 5)
        return std::nullopt;
    } else if (time_part.size() == 8) {
      if (std::sscanf(time_part.c_str(), "%2u:%2u:%2u%n", &h, &mi, &sec, &consumed) != 3 ||
          consumed != 8)
        return std::nullopt;
    } else {
      return std::nullopt;
    }
    if (mi != 0 || sec != 0) return std::nullopt;
  }
  c = CivilHour{y, mo, d, h};
  if (!c.ok()) return std::nullopt;
  return c;
}

std::string format_timestamp(const CivilHour& c) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u %02u:00", c.year, c.month, c.day, c.hour);
  return buf;
}

std::string format_date(const CivilHour& c) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", c.year, c.month, c.day);
  return buf;
}

HourGrid::HourGrid(CivilHour origin, std::size_t length)
    : origin_(origin), origin_abs_(absolute_hour(origin)), length_(length) {
  if (!origin.ok()) fail(ErrorKind::InvalidArgument, "grid origin is not a valid hour");
}

HourStamp HourGrid::stamp_of(std::int64_t index) const {
  return HourStamp{index, civil_from_absolute(origin_abs_ + index)};
}

std::optional<std::int64_t> HourGrid::index_of(const CivilHour& c) const {
  if (!c.ok()) return std::nullopt;
  const std::int64_t off = offset_of(c);
  if (!contains(off)) return std::nullopt;
  return off;
}

std::int64_t HourGrid::offset_of(const CivilHour& c) const {
  return absolute_hour(c) - origin_abs_;
}

bool is_leap_year(int year) { return std::chrono::year{year}.is_leap(); }

unsigned weekday_index(year_month_day d) { return weekday{sys_days{d}}.c_encoding(); }

int day_of_year(year_month_day d) {
  const sys_days jan1{d.year() / January / 1};
  int ordinal = static_cast<int>((sys_days{d} - jan1).count()) + 1;
  // Fold Feb 29 onto Feb 28 and shift the rest of a leap year down by one.
  if (d.year().is_leap() && ordinal >= 60) ordinal -= 1;
  return ordinal;
}

int hour_of_day(const HourStamp& t) { return static_cast<int>(t.wall.hour) + 1; }

int hour_of_week(const HourStamp& t) {
  return static_cast<int>(weekday_index(t.wall.date())) * 24 +
         static_cast<int>(t.wall.hour) + 1;
}

int day_of_year(const HourStamp& t) { return day_of_year(t.wall.date()); }

int day_of_week(const HourStamp& t) {
  return static_cast<int>(weekday_index(t.wall.date())) + 1;
}

int month_of_year(const HourStamp& t) { return static_cast<int>(t.wall.month); }

WeekProfile effective_coefficients(const WeekProfile& mean_profile) {
  WeekProfile out{};
  for (int hod = 0; hod < 24; ++hod) {
    const double low = mean_profile[hod];
    const double high =
        (mean_profile[2 * 24 + hod] + mean_profile[3 * 24 + hod] + mean_profile[4 * 24 + hod]) / 3.0;
    if (!std::isfinite(low) || !std::isfinite(high) || high == low) {
      fail(ErrorKind::Data, "degenerate load targets at hour of day " + std::to_string(hod + 1) +
                                ": high and low level targets coincide");
    }
    for (int wd = 0; wd < 7; ++wd) {
      double c;
      if (wd == 0) {
        c = 0.0;
      } else if (wd >= 2 && wd <= 4) {
        c = 1.0;
      } else {
        const double actual = mean_profile[wd * 24 + hod];
        c = 1.0 - (high - actual) / (high - low);
        c = std::clamp(c, 0.0, 1.0);
      }
      out[wd * 24 + hod] = c;
    }
  }
  return out;
}

}  // namespace loadcast
