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

#ifndef LOADCAST_MODEL_HPP
#define LOADCAST_MODEL_HPP

#include <memory>
#include <string>
#include <vector>

#include "design.hpp"
#include "lasso.hpp"

namespace loadcast {

struct Coefficient {
  ColumnMeta meta;
  double value = 0.0;  // original scale
};

/// One fitted equation: nonzero original-scale coefficients plus what the
/// simulator needs (basis sets and residual pool).
struct EquationModel {
  EquationSpec spec;
  std::shared_ptr<const EquationBases> bases;
  double intercept = 0.0;
  std::vector<Coefficient> coefficients;
  LassoFit fit;  // design-sized vectors are released after fitting

  Channel target() const { return spec.target; }
  int max_lag() const { return spec.max_lag(); }
  const std::vector<double>& residuals() const { return fit.residuals; }
};

struct FitOptions {
  LassoOptions lasso;
};

struct BivariateModel {
  ModelSpec spec;
  std::shared_ptr<const BasisContext> context;
  HourGrid grid;        // grid of the series the model was fitted on
  std::int64_t end = 0; // in-sample hours are [0, end)
  EquationModel load;
  EquationModel temperature;

  const EquationModel& equation(Channel c) const { return c == Channel::Load ? load : temperature; }
};

EquationModel fit_equation(const HourlySeries& series, const EquationSpec& eq,
                           std::shared_ptr<const BasisContext> context, std::int64_t end,
                           const FitOptions& options = {});

/// Fits both equations on hours [0, end) (-1: the whole series).
BivariateModel fit_bivariate(const HourlySeries& series, const ModelSpec& spec,
                             const HolidayCalendar& calendar, const FitOptions& options = {},
                             std::int64_t end = -1);

/// Chosen lambda, BIC trace and nonzero coefficients with provenance.
std::string fit_report_json(const BivariateModel& model);

}  // namespace loadcast

#endif  // LOADCAST_MODEL_HPP
