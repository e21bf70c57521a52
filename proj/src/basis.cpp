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

#include "basis.hpp"

#include <algorithm>
#include <cmath>

#include "error.hpp"

namespace loadcast {

namespace {

int index_range(CalendarIndex kind) {
  switch (kind) {
    case CalendarIndex::HourOfDay: return 24;
    case CalendarIndex::HourOfWeek: return 168;
    case CalendarIndex::DayOfYear: return 365;
  }
  return 0;
}

std::optional<int> window_position(const HolidayRule& rule, const HourStamp& t) {
  // A window reaches at most 18 hours into a neighbouring day, so the
  // occurrence in the previous, current or next year covers every case.
  for (int y = t.wall.year - 1; y <= t.wall.year + 1; ++y) {
    const auto d = rule.resolve(y);
    if (!d) continue;
    if (auto pos = holiday_window(t, *d)) return pos;
  }
  return std::nullopt;
}

// Effective coefficient for a fixed-date holiday window hour: the weekday is
// that of the holiday itself, so pre- and post-holiday hours inherit it.
double window_coefficient(const HourStamp& t, int position, const WeekProfile& effective) {
  const std::int64_t holiday_hour = absolute_hour(t.wall) - (position - 7);
  const CivilHour h = civil_from_absolute(holiday_hour);
  const unsigned wd = weekday_index(h.date());
  return effective[wd * 24 + t.wall.hour];
}

}  // namespace

std::string group_tag(BasisGroup g) { return "G" + std::to_string(static_cast<int>(g)); }

std::optional<BasisGroup> parse_group(std::string_view tag) {
  if (tag.size() == 2 && (tag[0] == 'G' || tag[0] == 'g') && tag[1] >= '1' && tag[1] <= '8')
    return static_cast<BasisGroup>(tag[1] - '0');
  return std::nullopt;
}

double cumulative_indicator(CalendarIndex kind, const HourStamp& t, int k) {
  const int range = index_range(kind);
  if (k < 1 || k > range) {
    fail(ErrorKind::InvalidArgument,
         "basis index " + std::to_string(k) + " outside 1.." + std::to_string(range));
  }
  int current = 0;
  switch (kind) {
    case CalendarIndex::HourOfDay: current = hour_of_day(t); break;
    case CalendarIndex::HourOfWeek: current = hour_of_week(t); break;
    case CalendarIndex::DayOfYear: current = day_of_year(t); break;
  }
  return k <= current ? 1.0 : 0.0;
}

double uniform_bspline(int degree, double x) {
  if (degree == 0) return (x >= 0.0 && x < 1.0) ? 1.0 : 0.0;
  if (x <= 0.0 || x >= degree + 1.0) return 0.0;
  const double d = static_cast<double>(degree);
  return (x / d) * uniform_bspline(degree - 1, x) +
         ((d + 1.0 - x) / d) * uniform_bspline(degree - 1, x - 1.0);
}

double periodic_cubic_bspline(double absolute_hours, int k) {
  if (k < 1 || k > kAnnualSplineCount)
    fail(ErrorKind::InvalidArgument, "periodic spline index out of range");
  double phase = std::fmod(absolute_hours, kAnnualPeriodHours);
  if (phase < 0.0) phase += kAnnualPeriodHours;
  const double x = phase / kAnnualPeriodHours * kAnnualSplineCount;
  // Knot replication: sum the cardinal spline over shifted copies of the period.
  double v = 0.0;
  for (int wrap = -1; wrap <= 1; ++wrap)
    v += uniform_bspline(3, x - (k - 1) + wrap * kAnnualSplineCount);
  return v;
}

double periodic_cubic_bspline(const HourStamp& t, int k) {
  return periodic_cubic_bspline(static_cast<double>(absolute_hour(t.wall)), k);
}

TrendFunction::TrendFunction(std::int64_t start_hour, std::int64_t end_hour)
    : start_(start_hour), end_(end_hour) {
  if (end_ <= start_) fail(ErrorKind::InvalidArgument, "empty trend window");
  const std::int64_t span = end_ - start_;
  cumulative_.resize(static_cast<std::size_t>(span) + 1);
  const double scale = 3.0 / static_cast<double>(span);
  double prev = uniform_bspline(2, 0.0);
  cumulative_[0] = 0.0;
  for (std::int64_t i = 1; i <= span; ++i) {
    const double cur = uniform_bspline(2, static_cast<double>(i) * scale);
    cumulative_[static_cast<std::size_t>(i)] =
        cumulative_[static_cast<std::size_t>(i - 1)] + 0.5 * (prev + cur);
    prev = cur;
  }
  const double total = cumulative_.back();
  for (auto& v : cumulative_) v /= total;
  cumulative_.back() = 1.0;
}

double TrendFunction::operator()(std::int64_t h) const {
  if (h <= start_) return 0.0;
  if (h >= end_) return 1.0;
  return cumulative_[static_cast<std::size_t>(h - start_)];
}

std::vector<TrendFunction> trend_candidates(int first_year, int last_year) {
  std::vector<TrendFunction> out;
  for (int y = first_year - 2; y <= last_year + 1; ++y) {
    out.emplace_back(absolute_hour(CivilHour{y, 1, 1, 0}), absolute_hour(CivilHour{y + 2, 1, 1, 0}));
  }
  return out;
}

bool trend_retained(const TrendFunction& f, std::int64_t first_hour, std::int64_t last_hour) {
  // Monotone, so the in-sample extremes sit at the range ends.
  const double lo = f(first_hour);
  const double hi = f(last_hour);
  return lo <= 0.1 && hi >= 0.9;
}

std::vector<TrendFunction> longterm_trend_basis(const CivilHour& first, const CivilHour& last) {
  const std::int64_t a = absolute_hour(first);
  const std::int64_t b = absolute_hour(last);
  std::vector<TrendFunction> out;
  if (b <= a) return out;
  for (auto& f : trend_candidates(first.year, last.year)) {
    if (trend_retained(f, a, b)) out.push_back(std::move(f));
  }
  return out;
}

double holiday_basis(const HolidayRule& rule, const HourStamp& t, int k,
                     const WeekProfile& effective) {
  if (k < 1 || k > kHolidayWindowHours)
    fail(ErrorKind::InvalidArgument, "holiday basis index out of range");
  const auto pos = window_position(rule, t);
  if (!pos || k > *pos) return 0.0;
  if (rule.kind == HolidayRule::Kind::Flexible) return 1.0;
  return window_coefficient(t, *pos, effective);
}

double interaction_basis(const HourStamp& t, int i, int j) {
  return cumulative_indicator(CalendarIndex::HourOfDay, t, i) * periodic_cubic_bspline(t, j);
}

BasisContext BasisContext::from_sample(const HourGrid& grid, std::span<const double> load,
                                       std::int64_t end, HolidayCalendar calendar,
                                       bool with_effective) {
  if (end <= 0) fail(ErrorKind::Data, "empty in-sample range");
  BasisContext ctx;
  const CivilHour first = grid.stamp_of(0).wall;
  const CivilHour last = grid.stamp_of(end - 1).wall;
  for (int y = first.year; y <= last.year; ++y) (void)calendar.dates_in_year(y);
  if (with_effective) {
    ctx.effective = effective_coefficients(weekly_mean_profile(grid, load, end, calendar));
  }
  ctx.trends = longterm_trend_basis(first, last);
  ctx.calendar = std::move(calendar);
  return ctx;
}

std::string BasisLabel::describe(const HolidayCalendar* calendar) const {
  std::string s = group_tag(group);
  if (holiday >= 0) {
    s += '[';
    if (calendar && holiday < static_cast<int>(calendar->rules().size()))
      s += calendar->rules()[static_cast<std::size_t>(holiday)].name;
    else
      s += "holiday " + std::to_string(holiday);
    s += ']';
  }
  s += '[' + std::to_string(index) + ']';
  return s;
}

BasisSet::BasisSet(std::vector<BasisGroup> groups, std::shared_ptr<const BasisContext> context)
    : groups_(std::move(groups)), context_(std::move(context)) {
  if (!context_) fail(ErrorKind::InvalidArgument, "basis set needs a context");
  const auto& rules = context_->calendar.rules();
  for (std::size_t r = 0; r < rules.size(); ++r) {
    (rules[r].kind == HolidayRule::Kind::Fixed ? fixed_rules_ : flexible_rules_).push_back(r);
  }
  auto push_range = [&](BasisGroup g, int count) {
    for (int k = 1; k <= count; ++k) labels_.push_back(BasisLabel{g, k, -1});
  };
  for (BasisGroup g : groups_) {
    switch (g) {
      case BasisGroup::G1: push_range(g, 24); break;
      case BasisGroup::G2: push_range(g, 168); break;
      case BasisGroup::G3: push_range(g, 365); break;
      case BasisGroup::G4: push_range(g, kAnnualSplineCount); break;
      case BasisGroup::G5: push_range(g, static_cast<int>(context_->trends.size())); break;
      case BasisGroup::G6:
      case BasisGroup::G7: {
        const auto& which = g == BasisGroup::G6 ? fixed_rules_ : flexible_rules_;
        for (std::size_t r : which)
          for (int k = 1; k <= kHolidayWindowHours; ++k)
            labels_.push_back(BasisLabel{g, k, static_cast<int>(r)});
        break;
      }
      case BasisGroup::G8: push_range(g, 24 * kAnnualSplineCount); break;
    }
  }
}

std::vector<BasisGroup> BasisSet::default_groups(Channel target) {
  using G = BasisGroup;
  if (target == Channel::Load) return {G::G1, G::G2, G::G3, G::G4, G::G5, G::G6, G::G7, G::G8};
  return {G::G1, G::G4, G::G8};
}

void BasisSet::evaluate(const HourStamp& t, std::span<double> out) const {
  if (out.size() != labels_.size()) fail(ErrorKind::InvalidArgument, "basis output size mismatch");
  const int hod = hour_of_day(t);
  const int how = hour_of_week(t);
  const int doy = day_of_year(t);
  const std::int64_t abs_h = absolute_hour(t.wall);
  double spline[kAnnualSplineCount];
  bool have_spline = false;
  auto splines = [&]() {
    if (!have_spline) {
      for (int j = 0; j < kAnnualSplineCount; ++j)
        spline[j] = periodic_cubic_bspline(static_cast<double>(abs_h), j + 1);
      have_spline = true;
    }
  };
  const auto& rules = context_->calendar.rules();

  std::size_t pos = 0;
  for (BasisGroup g : groups_) {
    switch (g) {
      case BasisGroup::G1:
        for (int k = 1; k <= 24; ++k) out[pos++] = k <= hod ? 1.0 : 0.0;
        break;
      case BasisGroup::G2:
        for (int k = 1; k <= 168; ++k) out[pos++] = k <= how ? 1.0 : 0.0;
        break;
      case BasisGroup::G3:
        for (int k = 1; k <= 365; ++k) out[pos++] = k <= doy ? 1.0 : 0.0;
        break;
      case BasisGroup::G4:
        splines();
        for (int j = 0; j < kAnnualSplineCount; ++j) out[pos++] = spline[j];
        break;
      case BasisGroup::G5:
        for (const auto& f : context_->trends) out[pos++] = f(abs_h);
        break;
      case BasisGroup::G6:
      case BasisGroup::G7: {
        const auto& which = g == BasisGroup::G6 ? fixed_rules_ : flexible_rules_;
        for (std::size_t r : which) {
          const auto wpos = window_position(rules[r], t);
          double value = 0.0;
          if (wpos) {
            value = rules[r].kind == HolidayRule::Kind::Flexible
                        ? 1.0
                        : window_coefficient(t, *wpos, context_->effective);
          }
          for (int k = 1; k <= kHolidayWindowHours; ++k)
            out[pos++] = (wpos && k <= *wpos) ? value : 0.0;
        }
        break;
      }
      case BasisGroup::G8:
        splines();
        for (int j = 0; j < kAnnualSplineCount; ++j)
          for (int i = 1; i <= 24; ++i) out[pos++] = i <= hod ? spline[j] : 0.0;
        break;
    }
  }
}

std::vector<double> BasisSet::evaluate(const HourStamp& t) const {
  std::vector<double> out(labels_.size());
  evaluate(t, out);
  return out;
}

std::vector<double> assemble_basis_vector(Channel target, const HourStamp& t,
                                          std::shared_ptr<const BasisContext> context) {
  return BasisSet(BasisSet::default_groups(target), std::move(context)).evaluate(t);
}

}  // namespace loadcast
