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

#ifndef LOADCAST_BASIS_HPP
#define LOADCAST_BASIS_HPP

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "channel.hpp"
#include "holidays.hpp"
#include "timegrid.hpp"

namespace loadcast {

// Basis groups for time-varying coefficients:
//   G1 hour of day, G2 hour of week, G3 day of year (cumulative indicators)
//   G4 periodic cubic B-splines over one year
//   G5 long-term trend (cumulated quadratic B-splines)
//   G6 fixed-date holidays, G7 rule-based holidays
//   G8 G1 x G4 interactions
enum class BasisGroup { G1 = 1, G2, G3, G4, G5, G6, G7, G8 };

std::string group_tag(BasisGroup g);
std::optional<BasisGroup> parse_group(std::string_view tag);

enum class CalendarIndex { HourOfDay, HourOfWeek, DayOfYear };

inline constexpr double kAnnualPeriodHours = 8765.76;  // 24 * 365.24
inline constexpr int kAnnualSplineCount = 6;
inline constexpr int kHolidayWindowHours = 36;

/// 1 when k <= the calendar index of t. Throws InvalidArgument for k outside
/// the index range.
double cumulative_indicator(CalendarIndex kind, const HourStamp& t, int k);

/// Cardinal B-spline of the given degree on the integer knots 0..degree+1,
/// by the Cox-de Boor recursion.
double uniform_bspline(int degree, double x);

/// k-th (1..6) cubic B-spline with equidistant knots, wrapped with period
/// kAnnualPeriodHours. The argument is hours since 1970-01-01 00:00.
double periodic_cubic_bspline(double absolute_hours, int k);
double periodic_cubic_bspline(const HourStamp& t, int k);

/// Monotone step from 0 to 1: the normalized running integral of a quadratic
/// B-spline spread over [start, end) in absolute hours. Integration is the
/// trapezoid rule on the hourly grid.
class TrendFunction {
 public:
  TrendFunction(std::int64_t start_hour, std::int64_t end_hour);

  double operator()(std::int64_t absolute_hours) const;
  double operator()(const HourStamp& t) const { return (*this)(absolute_hour(t.wall)); }

  std::int64_t start() const { return start_; }
  std::int64_t end() const { return end_; }
  int start_year() const { return civil_from_absolute(start_).year; }

 private:
  std::int64_t start_;
  std::int64_t end_;
  std::vector<double> cumulative_;  // one entry per hour in [start, end]
};

/// Two-year transitions starting on Jan 1 of consecutive years, covering
/// every window that can overlap [first_year, last_year].
std::vector<TrendFunction> trend_candidates(int first_year, int last_year);

/// A candidate is kept when its values over the in-sample hours sweep the
/// whole band: minimum <= 0.1 and maximum >= 0.9 of the plateau value 1.
bool trend_retained(const TrendFunction& f, std::int64_t first_hour, std::int64_t last_hour);

/// Retained trend functions for an in-sample range (inclusive bounds).
std::vector<TrendFunction> longterm_trend_basis(const CivilHour& first, const CivilHour& last);

/// Holiday window basis. Rule-based holidays give 1 when k <= window position;
/// fixed-date ones give the effective coefficient of the holiday's weekday at
/// the hour of day of t instead of 1.
double holiday_basis(const HolidayRule& rule, const HourStamp& t, int k,
                     const WeekProfile& effective);

/// G1_i(t) * G4_j(t).
double interaction_basis(const HourStamp& t, int i, int j);

/// Data-dependent inputs shared by every basis set of a fitted model.
struct BasisContext {
  HolidayCalendar calendar;
  WeekProfile effective{};
  std::vector<TrendFunction> trends;

  /// Effective coefficients come from the in-sample weekly load profile and
  /// are only computed when `with_effective` is set; trends are selected
  /// from the in-sample span [0, end).
  static BasisContext from_sample(const HourGrid& grid, std::span<const double> load,
                                  std::int64_t end, HolidayCalendar calendar,
                                  bool with_effective = true);
};

struct BasisLabel {
  BasisGroup group = BasisGroup::G1;
  int index = 1;      // 1-based within the group, or within one holiday's window
  int holiday = -1;   // rule index into the calendar for G6/G7

  std::string describe(const HolidayCalendar* calendar = nullptr) const;
};

/// Concatenation of the selected groups, in the order given.
class BasisSet {
 public:
  BasisSet(std::vector<BasisGroup> groups, std::shared_ptr<const BasisContext> context);

  static std::vector<BasisGroup> default_groups(Channel target);

  std::size_t size() const { return labels_.size(); }
  const std::vector<BasisLabel>& labels() const { return labels_; }
  const std::vector<BasisGroup>& groups() const { return groups_; }
  const BasisContext& context() const { return *context_; }

  void evaluate(const HourStamp& t, std::span<double> out) const;
  std::vector<double> evaluate(const HourStamp& t) const;

 private:
  std::vector<BasisGroup> groups_;
  std::shared_ptr<const BasisContext> context_;
  std::vector<BasisLabel> labels_;
  std::vector<std::size_t> fixed_rules_;     // calendar indices, G6 order
  std::vector<std::size_t> flexible_rules_;  // calendar indices, G7 order
};

/// Full basis vector for a target: load uses G1..G8, temperature G1, G4, G8.
std::vector<double> assemble_basis_vector(Channel target, const HourStamp& t,
                                          std::shared_ptr<const BasisContext> context);

}  // namespace loadcast

#endif  // LOADCAST_BASIS_HPP
