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

#include "model.hpp"

#include <algorithm>
#include <json.hpp>

#include "error.hpp"

namespace loadcast {

using nlohmann::json;

namespace {

bool uses_group(const EquationSpec& eq, BasisGroup g) {
  auto has = [g](const std::vector<BasisGroup>& v) { return std::find(v.begin(), v.end(), g) != v.end(); };
  if (has(eq.intercept_groups)) return true;
  for (const auto& v : eq.varying)
    if (has(v.groups)) return true;
  return false;
}

const char* kind_tag(ColumnMeta::Kind k) {
  switch (k) {
    case ColumnMeta::Kind::InterceptBasis: return "intercept_basis";
    case ColumnMeta::Kind::Lagged: return "lag";
    case ColumnMeta::Kind::LaggedBasis: return "lag_basis";
  }
  return "?";
}

json column_json(const ColumnMeta& m, const HolidayCalendar& cal) {
  json j;
  j["kind"] = kind_tag(m.kind);
  if (m.kind != ColumnMeta::Kind::InterceptBasis) {
    j["regressor"] = std::string(channel_name(m.regressor));
    j["threshold"] = format_threshold(m.threshold);
    j["lag"] = m.lag;
  }
  if (m.kind != ColumnMeta::Kind::Lagged) j["basis"] = m.basis.describe(&cal);
  return j;
}

json equation_json(const EquationModel& e, const HolidayCalendar& cal) {
  json j;
  const LassoFit& f = e.fit;
  j["rows"] = f.n;
  j["columns"] = f.p;
  j["dropped_constant_columns"] = f.dropped.size();
  j["lambda"] = f.lambda;
  j["lambda_index"] = f.lambda_index;
  j["path_stopped_early"] = f.stopped_early;
  j["intercept"] = e.intercept;
  j["nonzero"] = e.coefficients.size();
  double rss = 0.0;
  for (double r : f.residuals) rss += r * r;
  j["rss"] = rss;
  json trace = json::array();
  for (const auto& pt : f.bic_trace) {
    trace.push_back({{"lambda", pt.lambda},
                     {"bic", pt.bic},
                     {"rss_standardized", pt.rss},
                     {"nonzero", pt.nonzero},
                     {"sweeps", pt.sweeps},
                     {"converged", pt.converged}});
  }
  j["bic_trace"] = trace;
  json coefs = json::array();
  for (const auto& c : e.coefficients) {
    json cj = column_json(c.meta, cal);
    cj["value"] = c.value;
    coefs.push_back(std::move(cj));
  }
  j["coefficients"] = coefs;
  return j;
}

}  // namespace

EquationModel fit_equation(const HourlySeries& series, const EquationSpec& eq,
                           std::shared_ptr<const BasisContext> context, std::int64_t end,
                           const FitOptions& options) {
  EquationModel m;
  m.spec = eq;
  m.bases = std::make_shared<EquationBases>(eq, std::move(context));
  LassoFit fit;
  {
    DesignMatrix dm = build_design(series, eq, *m.bases, end);
    log(LogLevel::Info, std::string(channel_name(eq.target)) + " design: " + std::to_string(dm.n) +
                            " rows x " + std::to_string(dm.p) + " columns");
    fit = fit_lasso(dm, options.lasso);
  }
  m.intercept = fit.intercept;
  for (std::size_t j = 0; j < fit.p; ++j)
    if (fit.beta_std[j] != 0.0) m.coefficients.push_back({fit.meta[j], fit.beta_orig[j]});
  log(LogLevel::Info, std::string(channel_name(eq.target)) + " fit: lambda " +
                          std::to_string(fit.lambda) + ", " + std::to_string(m.coefficients.size()) +
                          " nonzero");
  // Keep the trace and residual pool; the dense coefficient vectors are
  // summarized by `coefficients`.
  fit.meta.clear();
  fit.meta.shrink_to_fit();
  m.fit = std::move(fit);
  return m;
}

BivariateModel fit_bivariate(const HourlySeries& series, const ModelSpec& spec,
                             const HolidayCalendar& calendar, const FitOptions& options,
                             std::int64_t end) {
  spec.validate();
  if (end < 0) end = static_cast<std::int64_t>(series.size());
  if (end > static_cast<std::int64_t>(series.size()))
    fail(ErrorKind::InvalidArgument, "fit range exceeds the series");
  const bool effective = uses_group(spec.load, BasisGroup::G6) || uses_group(spec.temperature, BasisGroup::G6);
  auto ctx = std::make_shared<const BasisContext>(
      BasisContext::from_sample(series.grid(), series.load(), end, calendar, effective));
  BivariateModel model;
  model.spec = spec;
  model.context = ctx;
  model.grid = series.grid();
  model.end = end;
  model.temperature = fit_equation(series, spec.temperature, ctx, end, options);
  model.load = fit_equation(series, spec.load, ctx, end, options);
  return model;
}

std::string fit_report_json(const BivariateModel& model) {
  json j;
  j["in_sample"] = {{"first", format_timestamp(model.grid.stamp_of(0).wall)},
                    {"last", format_timestamp(model.grid.stamp_of(model.end - 1).wall)},
                    {"hours", model.end}};
  json trends = json::array();
  for (const auto& t : model.context->trends)
    trends.push_back({{"start", format_timestamp(civil_from_absolute(t.start()))},
                      {"end", format_timestamp(civil_from_absolute(t.end()))}});
  j["trend_functions"] = trends;
  j["equations"]["load"] = equation_json(model.load, model.context->calendar);
  j["equations"]["temperature"] = equation_json(model.temperature, model.context->calendar);
  j["spec"] = json::parse(spec_to_json(model.spec));
  return j.dump(2) + "\n";
}

}  // namespace loadcast
