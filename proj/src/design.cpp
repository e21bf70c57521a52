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

#include "design.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "error.hpp"

namespace loadcast {

namespace {

constexpr std::size_t kRowBlock = 256;

struct LagRange {
  int lo;
  int hi;
};

// Sorted union of the lags an equation reads from one channel, as ranges.
std::vector<LagRange> lag_ranges(const EquationSpec& eq, Channel c) {
  std::vector<int> all;
  for (const auto& b : eq.blocks)
    if (b.regressor == c) all.insert(all.end(), b.lags.begin(), b.lags.end());
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  std::vector<LagRange> out;
  for (int k : all) {
    if (!out.empty() && out.back().hi + 1 == k)
      out.back().hi = k;
    else
      out.push_back({k, k});
  }
  return out;
}

std::vector<std::int64_t> missing_prefix(const HourlySeries& s, Channel c) {
  const auto& mask = s.missing_mask(c);
  std::vector<std::int64_t> pre(mask.size() + 1, 0);
  for (std::size_t i = 0; i < mask.size(); ++i) pre[i + 1] = pre[i] + mask[i];
  return pre;
}

const char* kind_name(ColumnMeta::Kind k) {
  switch (k) {
    case ColumnMeta::Kind::InterceptBasis: return "intercept";
    case ColumnMeta::Kind::Lagged: return "lag";
    case ColumnMeta::Kind::LaggedBasis: return "lag*basis";
  }
  return "?";
}

}  // namespace

std::string ColumnMeta::describe(const HolidayCalendar* calendar) const {
  std::string s = std::string(channel_name(target)) + ":" + kind_name(kind);
  if (kind != Kind::InterceptBasis) {
    s += " " + std::string(channel_name(regressor)) + "[t-" + std::to_string(lag) + "]";
    if (threshold != kNoThreshold) s += " max c=" + format_threshold(threshold);
  }
  if (kind != Kind::Lagged) s += " " + basis.describe(calendar);
  return s;
}

EquationBases::EquationBases(const EquationSpec& eq, std::shared_ptr<const BasisContext> ctx)
    : context(ctx), intercept(eq.intercept_groups, ctx) {
  varying.reserve(eq.varying.size());
  for (const auto& v : eq.varying) varying.emplace_back(v.groups, ctx);
}

std::vector<ColumnMeta> design_columns(const EquationSpec& eq, const EquationBases& bases) {
  std::vector<ColumnMeta> cols;
  const auto& ilabels = bases.intercept.labels();
  for (std::size_t l = 0; l < ilabels.size(); ++l) {
    ColumnMeta m;
    m.kind = ColumnMeta::Kind::InterceptBasis;
    m.target = eq.target;
    m.basis = ilabels[l];
    m.basis_slot = static_cast<int>(l);
    cols.push_back(m);
  }
  for (const auto& b : eq.blocks) {
    for (int k : b.lags) {
      ColumnMeta m;
      m.kind = ColumnMeta::Kind::Lagged;
      m.target = eq.target;
      m.regressor = b.regressor;
      m.threshold = b.threshold;
      m.lag = k;
      cols.push_back(m);
      for (std::size_t v = 0; v < eq.varying.size(); ++v) {
        const auto& vc = eq.varying[v];
        if (vc.regressor != b.regressor || vc.threshold != b.threshold || vc.lag != k) continue;
        const auto& labels = bases.varying[v].labels();
        for (std::size_t l = 0; l < labels.size(); ++l) {
          ColumnMeta mb = m;
          mb.kind = ColumnMeta::Kind::LaggedBasis;
          mb.basis = labels[l];
          mb.basis_slot = static_cast<int>(l);
          mb.varying = static_cast<int>(v);
          cols.push_back(mb);
        }
      }
    }
  }
  return cols;
}

std::vector<std::int64_t> usable_rows(const HourlySeries& series, const EquationSpec& eq,
                                      std::int64_t end) {
  if (end < 0) end = static_cast<std::int64_t>(series.size());
  end = std::min<std::int64_t>(end, static_cast<std::int64_t>(series.size()));
  const std::int64_t burn = eq.max_lag();
  const auto pre_target = missing_prefix(series, eq.target);
  const Channel chans[2] = {Channel::Load, Channel::Temperature};
  std::vector<LagRange> ranges[2];
  std::vector<std::int64_t> prefix[2];
  for (int c = 0; c < 2; ++c) {
    ranges[c] = lag_ranges(eq, chans[c]);
    if (!ranges[c].empty()) prefix[c] = missing_prefix(series, chans[c]);
  }
  std::vector<std::int64_t> rows;
  for (std::int64_t t = burn; t < end; ++t) {
    if (pre_target[t + 1] != pre_target[t]) continue;
    bool ok = true;
    for (int c = 0; c < 2 && ok; ++c) {
      for (const auto& r : ranges[c]) {
        if (prefix[c][t - r.lo + 1] != prefix[c][t - r.hi]) {
          ok = false;
          break;
        }
      }
    }
    if (ok) rows.push_back(t);
  }
  return rows;
}

DesignMatrix build_design(const HourlySeries& series, const EquationSpec& eq,
                          const EquationBases& bases, std::int64_t end) {
  DesignMatrix dm;
  dm.target = eq.target;
  dm.rows = usable_rows(series, eq, end);
  if (dm.rows.empty()) {
    fail(ErrorKind::Data, std::string(channel_name(eq.target)) +
                              " equation has no usable rows (burn-in " +
                              std::to_string(eq.max_lag()) + " hours)");
  }
  dm.meta = design_columns(eq, bases);
  dm.n = dm.rows.size();
  dm.p = dm.meta.size();
  dm.values.assign(dm.n * dm.p, 0.0);
  dm.response.resize(dm.n);
  const auto target = series.values(eq.target);
  for (std::size_t i = 0; i < dm.n; ++i) dm.response[i] = target[static_cast<std::size_t>(dm.rows[i])];

  // Varying coefficients that share a group list share one evaluation.
  std::map<std::vector<BasisGroup>, std::size_t> set_index;
  std::vector<const BasisSet*> sets;
  std::vector<std::size_t> varying_set(eq.varying.size());
  sets.push_back(&bases.intercept);
  for (std::size_t v = 0; v < eq.varying.size(); ++v) {
    const auto [it, fresh] = set_index.try_emplace(eq.varying[v].groups, sets.size());
    if (fresh) sets.push_back(&bases.varying[v]);
    varying_set[v] = it->second;
  }
  std::vector<std::vector<double>> buf(sets.size());
  for (std::size_t s = 0; s < sets.size(); ++s) buf[s].resize(kRowBlock * sets[s]->size());

  const auto load = series.load();
  const auto temp = series.temperature();
  const auto& grid = series.grid();

  for (std::size_t i0 = 0; i0 < dm.n; i0 += kRowBlock) {
    const std::size_t i1 = std::min(dm.n, i0 + kRowBlock);
    for (std::size_t i = i0; i < i1; ++i) {
      const HourStamp st = grid.stamp_of(dm.rows[i]);
      for (std::size_t s = 0; s < sets.size(); ++s) {
        const std::size_t w = sets[s]->size();
        if (w) sets[s]->evaluate(st, std::span<double>(buf[s].data() + (i - i0) * w, w));
      }
    }
    for (std::size_t j = 0; j < dm.p; ++j) {
      const ColumnMeta& m = dm.meta[j];
      double* col = dm.column(j);
      if (m.kind == ColumnMeta::Kind::InterceptBasis) {
        const std::size_t w = sets[0]->size();
        for (std::size_t i = i0; i < i1; ++i)
          col[i] = buf[0][(i - i0) * w + static_cast<std::size_t>(m.basis_slot)];
        continue;
      }
      const auto src = m.regressor == Channel::Load ? load : temp;
      if (m.kind == ColumnMeta::Kind::Lagged) {
        for (std::size_t i = i0; i < i1; ++i)
          col[i] = threshold_regressor(src[static_cast<std::size_t>(dm.rows[i] - m.lag)], m.threshold);
        continue;
      }
      const std::size_t s = varying_set[static_cast<std::size_t>(m.varying)];
      const std::size_t w = sets[s]->size();
      for (std::size_t i = i0; i < i1; ++i) {
        const double x = threshold_regressor(src[static_cast<std::size_t>(dm.rows[i] - m.lag)], m.threshold);
        col[i] = x * buf[s][(i - i0) * w + static_cast<std::size_t>(m.basis_slot)];
      }
    }
  }
  return dm;
}

double column_value(const ColumnMeta& meta, const HourlySeries& series, const EquationBases& bases,
                    std::int64_t t) {
  const HourStamp st = series.grid().stamp_of(t);
  const BasisSet* set = meta.kind == ColumnMeta::Kind::InterceptBasis
                            ? &bases.intercept
                            : (meta.varying >= 0 ? &bases.varying[static_cast<std::size_t>(meta.varying)]
                                                 : nullptr);
  double b = 1.0;
  if (meta.kind != ColumnMeta::Kind::Lagged) b = set->evaluate(st)[static_cast<std::size_t>(meta.basis_slot)];
  if (meta.kind == ColumnMeta::Kind::InterceptBasis) return b;
  const double x = threshold_regressor(series.values(meta.regressor)[static_cast<std::size_t>(t - meta.lag)],
                                       meta.threshold);
  return meta.kind == ColumnMeta::Kind::Lagged ? x : x * b;
}

std::vector<double> Standardization::slopes(std::span<const double> beta_std) const {
  if (beta_std.size() != scale.size()) fail(ErrorKind::InvalidArgument, "coefficient size mismatch");
  std::vector<double> out(beta_std.size());
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = y_scale * beta_std[j] / scale[j];
  return out;
}

double Standardization::intercept(std::span<const double> beta_std) const {
  const auto b = slopes(beta_std);
  double c = y_center;
  for (std::size_t j = 0; j < b.size(); ++j) c -= b[j] * center[j];
  return c;
}

Standardization standardize(DesignMatrix& dm) {
  if (dm.n < 2) fail(ErrorKind::Data, "standardization needs at least two rows");
  Standardization st;
  const double nn = static_cast<double>(dm.n);

  double ym = 0.0;
  for (double v : dm.response) ym += v;
  ym /= nn;
  double yss = 0.0;
  for (double v : dm.response) yss += (v - ym) * (v - ym);
  const double ysd = std::sqrt(yss / nn);
  if (!(ysd > 1e-12 * std::max(1.0, std::abs(ym))))
    fail(ErrorKind::Data, std::string(channel_name(dm.target)) + " response has zero variance");
  st.y_center = ym;
  st.y_scale = ysd;
  st.y.resize(dm.n);
  for (std::size_t i = 0; i < dm.n; ++i) st.y[i] = (dm.response[i] - ym) / ysd;

  std::size_t kept = 0;
  std::vector<ColumnMeta> meta;
  meta.reserve(dm.p);
  for (std::size_t j = 0; j < dm.p; ++j) {
    double* col = dm.column(j);
    double m = 0.0;
    for (std::size_t i = 0; i < dm.n; ++i) m += col[i];
    m /= nn;
    double ss = 0.0;
    for (std::size_t i = 0; i < dm.n; ++i) ss += (col[i] - m) * (col[i] - m);
    const double sd = std::sqrt(ss / nn);
    if (!(sd > 1e-12 * std::max(1.0, std::abs(m)))) {
      st.dropped.push_back(dm.meta[j]);
      continue;
    }
    double* dst = dm.values.data() + kept * dm.n;
    for (std::size_t i = 0; i < dm.n; ++i) dst[i] = (col[i] - m) / sd;
    st.center.push_back(m);
    st.scale.push_back(sd);
    meta.push_back(dm.meta[j]);
    ++kept;
  }
  if (!st.dropped.empty()) {
    log(LogLevel::Debug, std::string(channel_name(dm.target)) + " design: dropped " +
                             std::to_string(st.dropped.size()) + " constant columns");
  }
  dm.p = kept;
  dm.meta = std::move(meta);
  dm.values.resize(dm.n * dm.p);
  return st;
}

}  // namespace loadcast
