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

#include "holidays.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "error.hpp"

namespace loadcast {

using namespace std::chrono;

namespace {

constexpr std::array<std::string_view, 7> kShortDays = {"sun", "mon", "tue", "wed",
                                                        "thu", "fri", "sat"};
constexpr std::array<std::string_view, 7> kLongDays = {
    "sunday", "monday", "tuesday", "wednesday", "thursday", "friday", "saturday"};

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& ch : out) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return out;
}

std::optional<unsigned> parse_weekday(std::string_view token) {
  const std::string t = lower(token);
  for (unsigned i = 0; i < 7; ++i) {
    if (t == kShortDays[i] || t == kLongDays[i]) return i;
  }
  if (t.size() == 1 && t[0] >= '0' && t[0] <= '6') return static_cast<unsigned>(t[0] - '0');
  return std::nullopt;
}

std::optional<long> parse_int(std::string_view token) {
  if (token.empty()) return std::nullopt;
  const std::string s(token);
  char* end = nullptr;
  const long v = std::strtol(s.c_str(), &end, 10);
  if (end != s.c_str() + s.size()) return std::nullopt;
  return v;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

// Splits off the first whitespace-delimited token.
std::string_view next_token(std::string_view& rest) {
  rest = trim(rest);
  const auto pos = rest.find_first_of(" \t");
  std::string_view tok = rest.substr(0, pos);
  rest = pos == std::string_view::npos ? std::string_view{} : rest.substr(pos);
  return tok;
}

void validate_rule(const HolidayRule& r) {
  if (r.month < 1 || r.month > 12) fail(ErrorKind::InvalidArgument, "holiday month out of range");
  if (r.kind == HolidayRule::Kind::Fixed) {
    const year_month_day probe{year{2000} / month{r.month} / day{r.day}};
    if (!probe.ok()) fail(ErrorKind::InvalidArgument, "invalid fixed holiday date for " + r.name);
  } else {
    if (r.weekday > 6) fail(ErrorKind::InvalidArgument, "holiday weekday out of range");
    if (r.ordinal == 0 || r.ordinal < -1 || r.ordinal > 5)
      fail(ErrorKind::InvalidArgument, "holiday ordinal must be 1..5 or -1");
  }
}

}  // namespace

HolidayRule HolidayRule::fixed(unsigned m, unsigned d, std::string name) {
  HolidayRule r;
  r.kind = Kind::Fixed;
  r.month = m;
  r.day = d;
  r.name = std::move(name);
  return r;
}

HolidayRule HolidayRule::flexible(unsigned m, unsigned wd, int ord, std::string name) {
  HolidayRule r;
  r.kind = Kind::Flexible;
  r.month = m;
  r.weekday = wd;
  r.ordinal = ord;
  r.name = std::move(name);
  return r;
}

std::optional<year_month_day> HolidayRule::resolve(int y) const {
  namespace c = std::chrono;
  if (kind == Kind::Fixed) {
    const year_month_day d{c::year{y} / c::month{month} / c::day{day}};
    if (!d.ok()) return std::nullopt;
    return d;
  }
  const c::weekday wd{weekday};
  if (ordinal == -1) {
    const c::year_month_weekday_last last{c::year{y}, c::month{month}, c::weekday_last{wd}};
    return year_month_day{last};
  }
  const c::year_month_weekday nth{c::year{y}, c::month{month},
                                  c::weekday_indexed{wd, static_cast<unsigned>(ordinal)}};
  if (!nth.ok()) return std::nullopt;
  return year_month_day{nth};
}

HolidayCalendar::HolidayCalendar(std::vector<HolidayRule> rules) : rules_(std::move(rules)) {
  for (const auto& r : rules_) validate_rule(r);
}

HolidayCalendar HolidayCalendar::us_federal() {
  return HolidayCalendar({
      HolidayRule::fixed(1, 1, "New Year's Day"),
      HolidayRule::flexible(1, 1, 3, "Martin Luther King Jr. Day"),
      HolidayRule::flexible(2, 1, 3, "Washington's Birthday"),
      HolidayRule::flexible(5, 1, -1, "Memorial Day"),
      HolidayRule::fixed(7, 4, "Independence Day"),
      HolidayRule::flexible(9, 1, 1, "Labor Day"),
      HolidayRule::flexible(10, 1, 2, "Columbus Day"),
      HolidayRule::fixed(11, 11, "Veterans Day"),
      HolidayRule::flexible(11, 4, 4, "Thanksgiving Day"),
      HolidayRule::fixed(12, 25, "Christmas Day"),
  });
}

HolidayCalendar HolidayCalendar::parse(std::string_view text) {
  std::vector<HolidayRule> rules;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    auto bad = [&](const std::string& why) {
      fail(ErrorKind::Parse, "holiday calendar line " + std::to_string(line_no) + ": " + why);
    };
    std::string_view rest = line;
    const std::string kind = lower(next_token(rest));
    HolidayRule rule;
    if (kind == "fix") {
      const std::string_view md = next_token(rest);
      const auto dash = md.find('-');
      if (dash == std::string_view::npos) bad("expected <month>-<day>");
      const auto m = parse_int(md.substr(0, dash));
      const auto d = parse_int(md.substr(dash + 1));
      if (!m || !d || *m < 1 || *m > 12 || *d < 1 || *d > 31) bad("invalid month-day");
      rule = HolidayRule::fixed(static_cast<unsigned>(*m), static_cast<unsigned>(*d), "");
    } else if (kind == "flex") {
      const auto m = parse_int(next_token(rest));
      const auto wd = parse_weekday(next_token(rest));
      const auto ord = parse_int(next_token(rest));
      if (!m || *m < 1 || *m > 12) bad("invalid month");
      if (!wd) bad("invalid weekday");
      if (!ord || *ord == 0 || *ord < -1 || *ord > 5) bad("ordinal must be 1..5 or -1");
      rule = HolidayRule::flexible(static_cast<unsigned>(*m), *wd, static_cast<int>(*ord), "");
    } else {
      bad("expected FIX or FLEX");
    }
    rule.name = std::string(trim(rest));
    if (rule.name.empty()) bad("missing holiday name");
    try {
      validate_rule(rule);
    } catch (const Error& e) {
      bad(e.what());
    }
    rules.push_back(std::move(rule));
  }
  return HolidayCalendar(std::move(rules));
}

HolidayCalendar HolidayCalendar::load_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot open holiday calendar " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

std::vector<HolidayRule> HolidayCalendar::fixed() const {
  std::vector<HolidayRule> out;
  for (const auto& r : rules_)
    if (r.kind == HolidayRule::Kind::Fixed) out.push_back(r);
  return out;
}

std::vector<HolidayRule> HolidayCalendar::flexible() const {
  std::vector<HolidayRule> out;
  for (const auto& r : rules_)
    if (r.kind == HolidayRule::Kind::Flexible) out.push_back(r);
  return out;
}

std::vector<year_month_day> HolidayCalendar::dates_in_year(int y) const {
  std::vector<year_month_day> out;
  std::set<int> fixed_days;
  std::set<int> flex_days;
  for (const auto& r : rules_) {
    const auto d = r.resolve(y);
    if (!d) continue;
    const int key = static_cast<int>(sys_days{*d}.time_since_epoch().count());
    auto& own = r.kind == HolidayRule::Kind::Fixed ? fixed_days : flex_days;
    const auto& other = r.kind == HolidayRule::Kind::Fixed ? flex_days : fixed_days;
    if (other.count(key)) {
      fail(ErrorKind::Data, "holiday '" + r.name + "' coincides with a holiday of the other kind in " +
                                std::to_string(y));
    }
    own.insert(key);
    out.push_back(*d);
  }
  return out;
}

bool HolidayCalendar::is_holiday(year_month_day d) const {
  const int y = static_cast<int>(d.year());
  return std::any_of(rules_.begin(), rules_.end(), [&](const HolidayRule& r) {
    const auto rd = r.resolve(y);
    return rd && *rd == d;
  });
}

std::string HolidayCalendar::to_text() const {
  std::ostringstream out;
  for (const auto& r : rules_) {
    if (r.kind == HolidayRule::Kind::Fixed) {
      out << "FIX " << r.month << '-' << r.day << ' ' << r.name << '\n';
    } else {
      out << "FLEX " << r.month << ' ' << kShortDays[r.weekday] << ' ' << r.ordinal << ' '
          << r.name << '\n';
    }
  }
  return out.str();
}

std::optional<int> holiday_window(const HourStamp& t, year_month_day holiday) {
  const std::int64_t start = absolute_hour(civil_from_date(holiday)) - 6;
  const std::int64_t pos = absolute_hour(t.wall) - start + 1;
  if (pos < 1 || pos > 36) return std::nullopt;
  return static_cast<int>(pos);
}

WeekProfile weekly_mean_profile(const HourGrid& grid, std::span<const double> load, std::int64_t end,
                                const HolidayCalendar& calendar) {
  end = std::min<std::int64_t>(end, static_cast<std::int64_t>(load.size()));
  std::array<double, 168> sum_clean{}, sum_all{};
  std::array<std::size_t, 168> n_clean{}, n_all{};

  // Holiday weeks are keyed by the Sunday that opens them.
  std::set<std::int64_t> holiday_weeks;
  if (end > 0 && !calendar.empty()) {
    const int y0 = grid.stamp_of(0).wall.year;
    const int y1 = grid.stamp_of(end - 1).wall.year;
    for (int y = y0; y <= y1; ++y) {
      for (const auto& d : calendar.dates_in_year(y)) {
        const std::int64_t day_no = sys_days{d}.time_since_epoch().count();
        holiday_weeks.insert(day_no - weekday_index(d));
      }
    }
  }

  for (std::int64_t i = 0; i < end; ++i) {
    const double v = load[static_cast<std::size_t>(i)];
    if (!std::isfinite(v)) continue;
    const HourStamp s = grid.stamp_of(i);
    const int how = hour_of_week(s) - 1;
    sum_all[how] += v;
    ++n_all[how];
    const std::int64_t day_no = sys_days{s.wall.date()}.time_since_epoch().count();
    if (!holiday_weeks.count(day_no - weekday_index(s.wall.date()))) {
      sum_clean[how] += v;
      ++n_clean[how];
    }
  }

  const bool clean_complete =
      std::all_of(n_clean.begin(), n_clean.end(), [](std::size_t n) { return n > 0; });
  WeekProfile out{};
  for (int h = 0; h < 168; ++h) {
    if (clean_complete) {
      out[h] = sum_clean[h] / static_cast<double>(n_clean[h]);
    } else {
      if (n_all[h] == 0) fail(ErrorKind::Data, "no load observations for hour of week " +
                                                   std::to_string(h + 1));
      out[h] = sum_all[h] / static_cast<double>(n_all[h]);
    }
  }
  return out;
}

}  // namespace loadcast
