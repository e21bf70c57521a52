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

#include "benchmark.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <limits>

#include "error.hpp"

namespace loadcast {

namespace {

constexpr std::size_t kMoY = 1, kDoW = 12, kHoD = 18, kDoWHoD = 41, kFT = 179;
constexpr std::size_t kRowChunk = 512;

double nan() { return std::numeric_limits<double>::quiet_NaN(); }

// Cholesky factor of the lower triangle of A, in place and blocked. A column
// whose pivot falls below a relative tolerance depends on earlier columns; it
// is dropped, which leaves every leading factor the factor of the leading
// Gram with the same drops. Dropped columns end as a zero row and column with
// a unit diagonal; the returned mask marks them.
std::vector<char> dropping_cholesky(Eigen::MatrixXd& A, double tol = 1e-9) {
  using Eigen::Index;
  const Index n = A.rows();
  constexpr Index kBlock = 96;
  const Eigen::VectorXd d0 = A.diagonal();
  std::vector<char> drop(static_cast<std::size_t>(n), 0);
  for (Index k0 = 0; k0 < n; k0 += kBlock) {
    const Index kb = std::min(kBlock, n - k0), r0 = k0 + kb, nr = n - r0;
    for (Index j = k0; j < r0; ++j) {
      const double d = A(j, j);
      if (!(d > tol * std::max(d0(j), 1e-300))) {
        drop[static_cast<std::size_t>(j)] = 1;
        A.col(j).segment(j, r0 - j).setZero();
        continue;
      }
      const double l = std::sqrt(d);
      A(j, j) = l;
      A.col(j).segment(j + 1, r0 - j - 1) /= l;
      for (Index c = j + 1; c < r0; ++c) A.col(c).segment(c, r0 - c) -= A(c, j) * A.col(j).segment(c, r0 - c);
    }
    if (nr == 0) continue;
    auto panel = A.block(r0, k0, nr, kb);
    for (Index j = 0; j < kb; ++j) {
      if (drop[static_cast<std::size_t>(k0 + j)]) {
        panel.col(j).setZero();
        continue;
      }
      if (j > 0) panel.col(j).noalias() -= panel.leftCols(j) * A.row(k0 + j).segment(k0, j).transpose();
      panel.col(j) /= A(k0 + j, k0 + j);
    }
    A.block(r0, r0, nr, nr).selfadjointView<Eigen::Lower>().rankUpdate(panel, -1.0);
  }
  for (Index j = 0; j < n; ++j) {
    if (!drop[static_cast<std::size_t>(j)]) continue;
    A.row(j).head(j).setZero();
    A.col(j).tail(n - j).setZero();
    A(j, j) = 1.0;
  }
  return drop;
}

// Block of 105: x, x^2, x^3, then 11 MoY slots per power, then 23 HoD slots per power.
void f_block(double x, int month, int hod, double* out) {
  const double pw[3] = {x, x * x, x * x * x};
  for (int p = 0; p < 3; ++p) {
    out[p] = pw[p];
    if (month >= 2) out[3 + p * 11 + (month - 2)] = pw[p];
    if (hod >= 2) out[36 + p * 23 + (hod - 2)] = pw[p];
  }
}

// Prefix counts of missing temperatures: window [t - lookback, t] is clean
// when the count over it is zero.
std::vector<std::int64_t> missing_prefix(const HourlySeries& s, Channel c) {
  const auto& m = s.missing_mask(c);
  std::vector<std::int64_t> pre(m.size() + 1, 0);
  for (std::size_t i = 0; i < m.size(); ++i) pre[i + 1] = pre[i] + m[i];
  return pre;
}

std::vector<std::int64_t> usable_mlr_rows(const HourlySeries& s, int lookback, std::int64_t begin, std::int64_t end) {
  const auto tp = missing_prefix(s, Channel::Temperature);
  std::vector<std::int64_t> rows;
  begin = std::max<std::int64_t>(begin, lookback);
  end = std::min<std::int64_t>(end, static_cast<std::int64_t>(s.size()));
  for (std::int64_t t = begin; t < end; ++t) {
    if (s.missing(Channel::Load, static_cast<std::size_t>(t))) continue;
    if (tp[static_cast<std::size_t>(t + 1)] - tp[static_cast<std::size_t>(t - lookback)] != 0) continue;
    rows.push_back(t);
  }
  return rows;
}

TempScale scale_of(const HourlySeries& s, const std::vector<std::int64_t>& rows) {
  const auto T = s.temperature();
  double mean = 0.0;
  for (auto r : rows) mean += T[static_cast<std::size_t>(r)];
  mean /= static_cast<double>(rows.size());
  double var = 0.0;
  for (auto r : rows) {
    const double d = T[static_cast<std::size_t>(r)] - mean;
    var += d * d;
  }
  var /= static_cast<double>(rows.size());
  const double sd = std::sqrt(var);
  return {mean, sd > 0.0 ? sd : 1.0};
}

std::int64_t index_in(const HourGrid& grid, const CivilHour& c) {
  return absolute_hour(c) - absolute_hour(grid.origin());
}

// Scenario source for a target hour shifted back by `shift` years.
CivilHour shifted(const CivilHour& c, int shift) {
  CivilHour s = c;
  s.year -= shift;
  if (s.month == 2 && s.day == 29 && !is_leap_year(s.year)) s.day = 28;
  return s;
}

std::string form_name(const MlrForm& f) { return "(" + std::to_string(f.J) + "," + std::to_string(f.K) + ")"; }

}  // namespace

double daily_moving_avg_temp(std::span<const double> temperature, std::int64_t t, int j) {
  if (j < 1) fail(ErrorKind::InvalidArgument, "moving-average block index must be >= 1");
  const std::int64_t lo = t - 24 * static_cast<std::int64_t>(j);
  if (lo < 0 || t > static_cast<std::int64_t>(temperature.size())) {
    fail(ErrorKind::Data, "daily moving average " + std::to_string(j) + " at hour " + std::to_string(t) +
                              " reaches before the series start");
  }
  double sum = 0.0;
  for (std::int64_t h = lo; h < lo + 24; ++h) {
    const double v = temperature[static_cast<std::size_t>(h)];
    if (std::isnan(v)) fail(ErrorKind::Data, "missing temperature at hour " + std::to_string(h));
    sum += v;
  }
  return sum / 24.0;
}

std::size_t MlrForm::columns() const {
  return kVanillaColumns + static_cast<std::size_t>(J + K) * kTemperatureBlock;
}

void mlr_row(const MlrForm& form, const HourStamp& stamp, const double* temp, const TempScale& scale, double* out) {
  std::fill(out, out + form.columns(), 0.0);
  const int m = month_of_year(stamp);
  const int d = day_of_week(stamp);
  const int h = hour_of_day(stamp);
  out[0] = 1.0;
  if (m >= 2) out[kMoY + static_cast<std::size_t>(m - 2)] = 1.0;
  if (d >= 2) out[kDoW + static_cast<std::size_t>(d - 2)] = 1.0;
  if (h >= 2) out[kHoD + static_cast<std::size_t>(h - 2)] = 1.0;
  if (d >= 2 && h >= 2) out[kDoWHoD + static_cast<std::size_t>((d - 2) * 23 + (h - 2))] = 1.0;
  const double inv = 1.0 / scale.scale;
  f_block((temp[0] - scale.center) * inv, m, h, out + kFT);
  double* o = out + MlrForm::kVanillaColumns;
  for (int j = 1; j <= form.J; ++j, o += MlrForm::kTemperatureBlock) {
    const double* p = temp - 24 * j;
    double sum = 0.0;
    for (int k = 0; k < 24; ++k) sum += p[k];
    f_block((sum / 24.0 - scale.center) * inv, m, h, o);
  }
  for (int k = 1; k <= form.K; ++k, o += MlrForm::kTemperatureBlock)
    f_block((temp[-k] - scale.center) * inv, m, h, o);
}

std::vector<std::string> mlr_column_names(const MlrForm& form) {
  std::vector<std::string> names;
  names.reserve(form.columns());
  names.emplace_back("intercept");
  for (int m = 2; m <= 12; ++m) names.push_back("MoY" + std::to_string(m));
  for (int d = 2; d <= 7; ++d) names.push_back("DoW" + std::to_string(d));
  for (int h = 2; h <= 24; ++h) names.push_back("HoD" + std::to_string(h));
  for (int d = 2; d <= 7; ++d)
    for (int h = 2; h <= 24; ++h) names.push_back("DoW" + std::to_string(d) + ":HoD" + std::to_string(h));
  auto block = [&](const std::string& x) {
    const char* pw[3] = {"", "^2", "^3"};
    for (int p = 0; p < 3; ++p) names.push_back(x + pw[p]);
    for (int p = 0; p < 3; ++p)
      for (int m = 2; m <= 12; ++m) names.push_back(x + pw[p] + ":MoY" + std::to_string(m));
    for (int p = 0; p < 3; ++p)
      for (int h = 2; h <= 24; ++h) names.push_back(x + pw[p] + ":HoD" + std::to_string(h));
  };
  block("T");
  for (int j = 1; j <= form.J; ++j) block("Tday" + std::to_string(j));
  for (int k = 1; k <= form.K; ++k) block("Tlag" + std::to_string(k));
  return names;
}

MlrModel fit_mlr(const HourlySeries& series, const MlrForm& form, std::int64_t begin, std::int64_t end,
                 const MlrOptions& options) {
  if (form.J < 0 || form.K < 0) fail(ErrorKind::InvalidArgument, "negative recency order");
  const auto rows = usable_mlr_rows(series, form.lookback(), begin, end);
  const std::size_t p = form.columns();
  if (rows.empty()) fail(ErrorKind::Data, "empty benchmark training window");
  if (rows.size() < p) {
    log(LogLevel::Warning, "benchmark " + form_name(form) + ": " + std::to_string(rows.size()) +
                               " training rows for " + std::to_string(p) + " columns");
  }
  MlrModel model;
  model.form = form;
  model.begin = begin;
  model.end = end;
  model.rows = rows.size();
  model.scale = options.scale ? *options.scale : scale_of(series, rows);

  const auto n = static_cast<Eigen::Index>(rows.size());
  Eigen::MatrixXd X(n, static_cast<Eigen::Index>(p));
  Eigen::VectorXd y(n);
  std::vector<double> row(p);
  const auto T = series.temperature();
  const auto L = series.load();
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto t = rows[static_cast<std::size_t>(i)];
    mlr_row(form, series.grid().stamp_of(t), T.data() + t, model.scale, row.data());
    for (std::size_t j = 0; j < p; ++j) X(i, static_cast<Eigen::Index>(j)) = row[j];
    y(i) = L[static_cast<std::size_t>(t)];
  }
  // Blocked QR shrinks the problem to p x p before the rank-revealing step.
  Eigen::VectorXd beta;
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod;
  if (n > static_cast<Eigen::Index>(p)) {
    Eigen::HouseholderQR<Eigen::Ref<Eigen::MatrixXd>> qr(X);
    const auto P = static_cast<Eigen::Index>(p);
    const Eigen::VectorXd qty = (qr.householderQ().transpose() * y).head(P);
    cod.compute(qr.matrixQR().topRows(P).triangularView<Eigen::Upper>());
    beta = cod.solve(qty);
  } else {
    cod.compute(X);
    beta = cod.solve(y);
  }
  model.rank = static_cast<std::size_t>(cod.rank());
  if (model.rank < p) {
    log(LogLevel::Info, "benchmark " + form_name(form) + ": rank " + std::to_string(model.rank) + " of " +
                            std::to_string(p) + " columns, minimum-norm solution");
  }
  model.coefficients.assign(beta.data(), beta.data() + beta.size());

  double rss = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto t = rows[static_cast<std::size_t>(i)];
    mlr_row(form, series.grid().stamp_of(t), T.data() + t, model.scale, row.data());
    double f = 0.0;
    for (std::size_t j = 0; j < p; ++j) f += row[j] * model.coefficients[j];
    const double r = y(i) - f;
    rss += r * r;
  }
  model.rss = rss;
  return model;
}

std::vector<double> predict_mlr(const MlrModel& model, const HourGrid& grid, std::span<const double> temperature,
                                std::int64_t begin, std::int64_t end) {
  const std::size_t p = model.form.columns();
  const int lb = model.form.lookback();
  std::vector<double> row(p), out;
  out.reserve(static_cast<std::size_t>(std::max<std::int64_t>(0, end - begin)));
  for (std::int64_t t = begin; t < end; ++t) {
    bool ok = t - lb >= 0 && t < static_cast<std::int64_t>(temperature.size());
    for (std::int64_t s = t - lb; ok && s <= t; ++s) ok = !std::isnan(temperature[static_cast<std::size_t>(s)]);
    if (!ok) {
      out.push_back(nan());
      continue;
    }
    mlr_row(model.form, grid.stamp_of(t), temperature.data() + t, model.scale, row.data());
    double f = 0.0;
    for (std::size_t j = 0; j < p; ++j) f += row[j] * model.coefficients[j];
    out.push_back(f);
  }
  return out;
}

JkSelection select_jk(const HourlySeries& series, int target_year, int max_j, int max_k) {
  using Eigen::Index;
  if (max_j < 0 || max_k < 0) fail(ErrorKind::InvalidArgument, "negative (J,K) grid bound");
  const auto& grid = series.grid();
  const std::int64_t a = index_in(grid, CivilHour{target_year - 3, 1, 1, 0});
  const std::int64_t b = index_in(grid, CivilHour{target_year - 1, 1, 1, 0});
  const std::int64_t c = index_in(grid, CivilHour{target_year, 1, 1, 0});
  if (a < 0 || c > static_cast<std::int64_t>(series.size())) {
    fail(ErrorKind::Data, "insufficient history for the (J,K) search of " + std::to_string(target_year) +
                              ": needs " + std::to_string(target_year - 3) + "-01-01 through " +
                              std::to_string(target_year - 1) + "-12-31");
  }
  const MlrForm full{max_j, max_k};
  const std::size_t P = full.columns();
  const std::size_t B = MlrForm::kTemperatureBlock;
  const std::size_t lag_base = MlrForm::kVanillaColumns + static_cast<std::size_t>(max_j) * B;
  // Common rows for every candidate keep the candidates comparable.
  const auto train = usable_mlr_rows(series, full.lookback(), a, b);
  const auto val = usable_mlr_rows(series, full.lookback(), b, c);
  if (train.empty() || val.empty()) fail(ErrorKind::Data, "no usable rows for the (J,K) search");
  const TempScale scale = scale_of(series, train);
  const auto T = series.temperature();
  const auto Y = series.load();

  auto fill = [&](std::int64_t t, double* out) { mlr_row(full, grid.stamp_of(t), T.data() + t, scale, out); };

  std::vector<double> row(P);
  std::vector<double> mean(P, 0.0), sd(P, 0.0);
  for (auto t : train) {
    fill(t, row.data());
    for (std::size_t j = 0; j < P; ++j) mean[j] += row[j];
  }
  for (auto& m : mean) m /= static_cast<double>(train.size());
  for (auto t : train) {
    fill(t, row.data());
    for (std::size_t j = 0; j < P; ++j) sd[j] += (row[j] - mean[j]) * (row[j] - mean[j]);
  }
  std::vector<std::size_t> kept;  // full index of every retained column
  for (std::size_t j = 0; j < P; ++j) {
    sd[j] = std::sqrt(sd[j] / static_cast<double>(train.size()));
    if (j == 0 || sd[j] > 1e-12 * std::max(1.0, std::abs(mean[j]))) kept.push_back(j);
  }
  mean[0] = 0.0;
  sd[0] = 1.0;
  const auto Pk = static_cast<Index>(kept.size());

  auto chunk_rows = [&](const std::vector<std::int64_t>& rows, std::size_t lo, std::size_t hi, Eigen::MatrixXd& M) {
    M.resize(static_cast<Index>(hi - lo), Pk);
    for (std::size_t i = lo; i < hi; ++i) {
      fill(rows[i], row.data());
      for (Index q = 0; q < Pk; ++q) {
        const std::size_t j = kept[static_cast<std::size_t>(q)];
        M(static_cast<Index>(i - lo), q) = (row[j] - mean[j]) / sd[j];
      }
    }
  };

  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(Pk, Pk);
  Eigen::VectorXd g = Eigen::VectorXd::Zero(Pk);
  Eigen::MatrixXd M;
  for (std::size_t lo = 0; lo < train.size(); lo += kRowChunk) {
    const std::size_t hi = std::min(train.size(), lo + kRowChunk);
    chunk_rows(train, lo, hi, M);
    Eigen::VectorXd yc(static_cast<Index>(hi - lo));
    for (std::size_t i = lo; i < hi; ++i) yc(static_cast<Index>(i - lo)) = Y[static_cast<std::size_t>(train[i])];
    G.selfadjointView<Eigen::Lower>().rankUpdate(M.transpose());
    g.noalias() += M.transpose() * yc;
  }
  G.triangularView<Eigen::StrictlyUpper>() = G.transpose();

  const int nj = max_j + 1, nk = max_k + 1;
  Eigen::MatrixXd coef = Eigen::MatrixXd::Zero(Pk, nj * nk);
  for (int J = 0; J <= max_j; ++J) {
    const std::size_t d_end = MlrForm::kVanillaColumns + static_cast<std::size_t>(J) * B;
    std::vector<Index> sel;
    for (Index q = 0; q < Pk; ++q) {
      const std::size_t j = kept[static_cast<std::size_t>(q)];
      if (j < d_end || j >= lag_base) sel.push_back(q);
    }
    // Leading size for each K.
    std::vector<Index> lead(static_cast<std::size_t>(nk));
    for (int K = 0; K <= max_k; ++K) {
      const std::size_t bound = lag_base + static_cast<std::size_t>(K) * B;
      lead[static_cast<std::size_t>(K)] = static_cast<Index>(
          std::count_if(sel.begin(), sel.end(), [&](Index q) { return kept[static_cast<std::size_t>(q)] < bound; }));
    }
    const auto S = static_cast<Index>(sel.size());
    Eigen::MatrixXd Gs(S, S);
    Eigen::VectorXd gs(S);
    for (Index u = 0; u < S; ++u) {
      gs(u) = g(sel[static_cast<std::size_t>(u)]);
      for (Index v = 0; v < S; ++v) Gs(v, u) = G(sel[static_cast<std::size_t>(v)], sel[static_cast<std::size_t>(u)]);
    }
    const auto drop = dropping_cholesky(Gs);
    if (const auto dropped = std::count(drop.begin(), drop.end(), 1)) {
      log(LogLevel::Info, "(J,K) search: J=" + std::to_string(J) + " drops " + std::to_string(dropped) +
                              " linearly dependent columns");
    }
    Eigen::VectorXd z = Gs.triangularView<Eigen::Lower>().solve(gs);
    for (Index u = 0; u < S; ++u)
      if (drop[static_cast<std::size_t>(u)]) z(u) = 0.0;
    for (int K = 0; K <= max_k; ++K) {
      const Index m = lead[static_cast<std::size_t>(K)];
      const Eigen::VectorXd beta = Gs.topLeftCorner(m, m).triangularView<Eigen::Lower>().transpose().solve(z.head(m));
      for (Index u = 0; u < m; ++u) coef(sel[static_cast<std::size_t>(u)], J * nk + K) = beta(u);
    }
  }
  G.resize(0, 0);

  std::vector<double> err(static_cast<std::size_t>(nj * nk), 0.0);
  std::size_t counted = 0, zero = 0;
  for (std::size_t lo = 0; lo < val.size(); lo += kRowChunk) {
    const std::size_t hi = std::min(val.size(), lo + kRowChunk);
    chunk_rows(val, lo, hi, M);
    const Eigen::MatrixXd pred = M * coef;
    for (std::size_t i = lo; i < hi; ++i) {
      const double y = Y[static_cast<std::size_t>(val[i])];
      if (y == 0.0) {
        ++zero;
        continue;
      }
      ++counted;
      for (Index k = 0; k < nj * nk; ++k)
        err[static_cast<std::size_t>(k)] += std::abs(y - pred(static_cast<Index>(i - lo), k)) / std::abs(y);
    }
  }
  if (zero > 0) log(LogLevel::Warning, "(J,K) search: " + std::to_string(zero) + " zero validation loads excluded");
  if (counted == 0) fail(ErrorKind::Data, "no nonzero validation loads for the (J,K) search");

  JkSelection out;
  out.max_j = max_j;
  out.max_k = max_k;
  out.grid_mape.resize(err.size());
  out.mape = std::numeric_limits<double>::infinity();
  for (int J = 0; J <= max_j; ++J)
    for (int K = 0; K <= max_k; ++K) {
      const std::size_t k = static_cast<std::size_t>(J * nk + K);
      const double v = 100.0 * err[k] / static_cast<double>(counted);
      out.grid_mape[k] = v;
      if (v < out.mape) {
        out.mape = v;
        out.J = J;
        out.K = K;
      }
    }
  log(LogLevel::Info, "(J,K) search for " + std::to_string(target_year) + ": selected " +
                          form_name({out.J, out.K}) + ", validation MAPE " + std::to_string(out.mape));
  return out;
}

std::int64_t training_begin(const HourGrid& grid, const CivilHour& first, int months) {
  using namespace std::chrono;
  year_month_day d = year{first.year} / month{first.month} / day{first.day};
  d = d - std::chrono::months{months};
  if (!d.ok()) d = year_month_day{sys_days{d.year() / d.month() / last} + days{1}};
  const std::int64_t idx = index_in(grid, civil_from_date(d, first.hour));
  if (idx < 0) {
    log(LogLevel::Warning, "training window of " + std::to_string(months) + " months before " +
                               format_timestamp(first) + " starts before the data; truncated");
    return 0;
  }
  return idx;
}

std::vector<int> available_weather_years(const HourlySeries& series, const CivilHour& first, std::size_t hours) {
  const auto& grid = series.grid();
  const std::int64_t f = index_in(grid, first);
  std::vector<int> years;
  for (int w = grid.origin().year; w < first.year; ++w) {
    const int shift = first.year - w;
    bool ok = true;
    for (std::size_t h = 0; ok && h < hours; ++h) {
      const auto tgt = civil_from_absolute(absolute_hour(first) + static_cast<std::int64_t>(h));
      const std::int64_t s = index_in(grid, shifted(tgt, shift));
      ok = s >= 0 && s < f && s < static_cast<std::int64_t>(series.size()) &&
           !series.missing(Channel::Temperature, static_cast<std::size_t>(s));
    }
    if (ok) years.push_back(w);
  }
  return years;
}

std::vector<std::vector<double>> scenario_forecasts(const MlrModel& model, const HourlySeries& series,
                                                    const CivilHour& first, std::size_t hours,
                                                    const std::vector<int>& weather_years) {
  if (weather_years.empty()) fail(ErrorKind::Data, "no weather scenarios");
  const auto& grid = series.grid();
  const std::int64_t f = index_in(grid, first);
  const int lb = model.form.lookback();
  const auto T = series.temperature();
  if (f - lb < 0 || f > static_cast<std::int64_t>(series.size())) {
    fail(ErrorKind::Data, "scenario forecast at " + format_timestamp(first) + " needs " + std::to_string(lb) +
                              " observed hours before the start");
  }
  std::vector<double> tv(static_cast<std::size_t>(lb) + hours);
  for (int i = 0; i < lb; ++i) {
    const double v = T[static_cast<std::size_t>(f - lb + i)];
    if (std::isnan(v)) fail(ErrorKind::Data, "missing temperature in the lead-in before " + format_timestamp(first));
    tv[static_cast<std::size_t>(i)] = v;
  }
  const std::size_t p = model.form.columns();
  std::vector<double> row(p);
  std::vector<std::vector<double>> out;
  for (int w : weather_years) {
    const int shift = first.year - w;
    if (shift < 1) fail(ErrorKind::InvalidArgument, "weather year " + std::to_string(w) + " is not before the target");
    for (std::size_t h = 0; h < hours; ++h) {
      const auto tgt = civil_from_absolute(absolute_hour(first) + static_cast<std::int64_t>(h));
      const auto src = shifted(tgt, shift);
      const std::int64_t s = index_in(grid, src);
      if (s < 0 || s >= f || std::isnan(T[static_cast<std::size_t>(s)])) {
        fail(ErrorKind::Data, "weather year " + std::to_string(w) + " cannot be aligned to " + format_timestamp(tgt) +
                                  ": no observed temperature at " + format_timestamp(src));
      }
      tv[static_cast<std::size_t>(lb) + h] = T[static_cast<std::size_t>(s)];
    }
    std::vector<double> fc(hours);
    for (std::size_t h = 0; h < hours; ++h) {
      mlr_row(model.form, grid.stamp_of(f + static_cast<std::int64_t>(h)), tv.data() + lb + h, model.scale, row.data());
      double v = 0.0;
      for (std::size_t j = 0; j < p; ++j) v += row[j] * model.coefficients[j];
      fc[h] = v;
    }
    out.push_back(std::move(fc));
  }
  return out;
}

QuantileForecast scenario_quantiles(const MlrModel& model, const HourlySeries& series, const CivilHour& first,
                                    std::size_t hours, const std::vector<int>& weather_years) {
  const auto sc = scenario_forecasts(model, series, first, hours, weather_years);
  QuantileForecast qf;
  qf.start = first;
  qf.rows.resize(hours);
  std::vector<double> col(sc.size());
  for (std::size_t h = 0; h < hours; ++h) {
    for (std::size_t s = 0; s < sc.size(); ++s) col[s] = sc[s][h];
    qf.rows[h] = quantile_row(col);
  }
  return qf;
}

QuantileForecast benchmark_task_forecast(const HourlySeries& series, BenchmarkKind kind, TaskKind task,
                                         std::chrono::year_month_day cutoff, const BenchmarkOptions& options,
                                         BenchmarkReport* report) {
  const std::int64_t end = cutoff_end(series.grid(), cutoff);
  const HourlySeries history = series.truncated(static_cast<std::size_t>(end));
  const TaskWindow win = task_window(task, cutoff);
  const int months = kind == BenchmarkKind::Vanilla5y ? 60 : options.training_months;
  if (months < 1) fail(ErrorKind::InvalidArgument, "training window must be at least one month");
  const std::int64_t begin = training_begin(history.grid(), win.first, months);

  BenchmarkReport rep;
  MlrForm form;
  if (kind == BenchmarkKind::Recency) {
    if (options.form) {
      form = *options.form;
    } else {
      rep.selection = select_jk(history, win.first.year, options.max_j, options.max_k);
      form = {rep.selection->J, rep.selection->K};
    }
  }
  rep.model = fit_mlr(history, form, begin, end);
  rep.weather_years =
      options.weather_years.empty() ? available_weather_years(history, win.first, win.hours) : options.weather_years;
  if (rep.weather_years.empty()) {
    fail(ErrorKind::Data, "no complete weather year is available before " + format_timestamp(win.first));
  }
  auto qf = scenario_quantiles(rep.model, history, win.first, win.hours, rep.weather_years);
  if (report) *report = std::move(rep);
  return qf;
}

std::string benchmark_report_json(const BenchmarkReport& report) {
  using nlohmann::ordered_json;
  const auto& m = report.model;
  ordered_json j;
  j["form"] = {{"J", m.form.J}, {"K", m.form.K}};
  j["columns"] = m.form.columns();
  j["rows"] = m.rows;
  j["rank"] = m.rank;
  j["rss"] = m.rss;
  j["temperature_scale"] = {{"center", m.scale.center}, {"scale", m.scale.scale}};
  j["weather_years"] = report.weather_years;
  if (report.selection) {
    const auto& s = *report.selection;
    j["selection"] = {{"J", s.J}, {"K", s.K}, {"validation_mape", s.mape}, {"max_j", s.max_j}, {"max_k", s.max_k},
                      {"grid_mape", s.grid_mape}};
  }
  const auto names = mlr_column_names(m.form);
  ordered_json coef = ordered_json::object();
  for (std::size_t i = 0; i < names.size(); ++i) coef[names[i]] = m.coefficients[i];
  j["coefficients"] = std::move(coef);
  return j.dump(2);
}

}  // namespace loadcast
