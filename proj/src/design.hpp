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

#ifndef LOADCAST_DESIGN_HPP
#define LOADCAST_DESIGN_HPP

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "basis.hpp"
#include "model_spec.hpp"
#include "series.hpp"

namespace loadcast {

struct ColumnMeta {
  enum class Kind {
    InterceptBasis,  // B_l(t)
    Lagged,          // max{Y_{j,t-k}, c}
    LaggedBasis,     // max{Y_{j,t-k}, c} * B_l(t)
  };
  Kind kind = Kind::Lagged;
  Channel target = Channel::Load;
  Channel regressor = Channel::Load;
  double threshold = kNoThreshold;
  int lag = 0;
  BasisLabel basis;     // basis kinds only
  int basis_slot = -1;  // position inside the owning BasisSet
  int varying = -1;     // index into EquationSpec::varying, -1 for the intercept

  std::string describe(const HolidayCalendar* calendar = nullptr) const;
};

/// Dense column-major regressor matrix for one equation.
struct DesignMatrix {
  Channel target = Channel::Load;
  std::vector<std::int64_t> rows;  // grid indices of the usable hours
  std::size_t n = 0;
  std::size_t p = 0;
  std::vector<double> values;  // n * p, column j at [j * n, (j + 1) * n)
  std::vector<ColumnMeta> meta;
  std::vector<double> response;

  double* column(std::size_t j) { return values.data() + j * n; }
  const double* column(std::size_t j) const { return values.data() + j * n; }
  double at(std::size_t i, std::size_t j) const { return values[j * n + i]; }
};

/// max{y, c}; c = -inf leaves y unchanged.
inline double threshold_regressor(double y, double c) { return y > c ? y : c; }

/// Basis sets needed by an equation: the intercept set first (may be empty),
/// then one per time-varying coefficient, in spec order.
struct EquationBases {
  std::shared_ptr<const BasisContext> context;
  BasisSet intercept;
  std::vector<BasisSet> varying;

  EquationBases(const EquationSpec& eq, std::shared_ptr<const BasisContext> context);
};

/// Column layout of an equation before any data is read.
std::vector<ColumnMeta> design_columns(const EquationSpec& eq, const EquationBases& bases);

/// Grid indices t in [max_lag, end) whose response and every required lagged
/// value are observed.
std::vector<std::int64_t> usable_rows(const HourlySeries& series, const EquationSpec& eq,
                                      std::int64_t end);

/// Builds the design of one equation over hours before `end` (-1: all).
/// Throws Data when no row is usable.
DesignMatrix build_design(const HourlySeries& series, const EquationSpec& eq,
                          const EquationBases& bases, std::int64_t end = -1);

/// Value of one column at grid index t, recomputed from the raw series.
double column_value(const ColumnMeta& meta, const HourlySeries& series, const EquationBases& bases,
                    std::int64_t t);

/// Centering and scaling applied by standardize().
struct Standardization {
  std::vector<double> center;  // per retained column
  std::vector<double> scale;   // population standard deviation
  double y_center = 0.0;
  double y_scale = 1.0;
  std::vector<double> y;  // standardized response
  std::vector<ColumnMeta> dropped;

  /// Original-scale slopes and intercept for standardized coefficients.
  std::vector<double> slopes(std::span<const double> beta_std) const;
  double intercept(std::span<const double> beta_std) const;
};

/// Centers and scales every column and the response to mean 0 and variance 1
/// in place. Constant columns are removed from the matrix and from `meta`.
/// Throws Data for a constant response or fewer than two rows.
Standardization standardize(DesignMatrix& dm);

}  // namespace loadcast

#endif  // LOADCAST_DESIGN_HPP
