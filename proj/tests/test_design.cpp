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

#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "design.hpp"
#include "error.hpp"
#include "synth.hpp"

using namespace loadcast;

namespace {

HourlySeries small_series(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const HourGrid g(CivilHour{2011, 1, 1, 0}, n);
  auto temp = synth::temperature(n, absolute_hour(CivilHour{2011, 1, 1, 0}), rng);
  auto load = synth::ar1(n, 0.8, 5.0, 150.0, rng);
  return HourlySeries(g, std::move(load), std::move(temp));
}

std::shared_ptr<BasisContext> context_for(const HourlySeries& s) {
  return std::make_shared<BasisContext>(
      BasisContext::from_sample(s.grid(), s.load(), static_cast<std::int64_t>(s.size()), HolidayCalendar::us_federal()));
}

EquationSpec toy_equation() {
  EquationSpec eq;
  eq.target = Channel::Load;
  eq.intercept_groups = {BasisGroup::G1};
  eq.blocks = {{Channel::Load, kNoThreshold, {1, 2, 24}},
               {Channel::Load, 150.0, {1}},
               {Channel::Temperature, kNoThreshold, {1, 3}},
               {Channel::Temperature, 60.0, {2}}};
  eq.varying = {{Channel::Load, kNoThreshold, 1, {BasisGroup::G1}},
                {Channel::Temperature, kNoThreshold, 3, {BasisGroup::G4}}};
  return eq;
}

}  // namespace

TEST_CASE("design column layout and provenance") {
  const auto s = small_series(24 * 20, 3);
  const auto ctx = context_for(s);
  const auto eq = toy_equation();
  const EquationBases bases(eq, ctx);
  const auto cols = design_columns(eq, bases);
  // 23 non-constant G1 intercept columns, 7 lagged, 23 + 6 varying.
  const std::size_t basis_g1 = bases.intercept.size();
  std::size_t n_lagged = 0, n_vary = 0, n_icpt = 0;
  for (const auto& c : cols) {
    if (c.kind == ColumnMeta::Kind::Lagged) ++n_lagged;
    if (c.kind == ColumnMeta::Kind::LaggedBasis) ++n_vary;
    if (c.kind == ColumnMeta::Kind::InterceptBasis) ++n_icpt;
  }
  CHECK(n_lagged == 7);
  CHECK(n_icpt + 1 >= basis_g1);
  CHECK(n_vary == bases.varying[0].size() + bases.varying[1].size());

  const auto dm = build_design(s, eq, bases);
  CHECK(dm.rows.front() == 24);  // burn-in is the largest lag
  CHECK(dm.n == s.size() - 24);
  CHECK(dm.p == cols.size());
  const auto y = s.load();
  const auto t = s.temperature();
  for (std::size_t i = 0; i < dm.n; i += 17) {
    const auto r = dm.rows[i];
    CHECK(dm.response[i] == y[static_cast<std::size_t>(r)]);
    for (std::size_t j = 0; j < dm.p; ++j) {
      const auto& m = dm.meta[j];
      CHECK(dm.at(i, j) == column_value(m, s, bases, r));
      if (m.kind == ColumnMeta::Kind::Lagged) {
        const auto src = m.regressor == Channel::Load ? y : t;
        CHECK(dm.at(i, j) == std::max(src[static_cast<std::size_t>(r - m.lag)], m.threshold));
      }
    }
  }
}

TEST_CASE("rows with missing lagged values are excluded") {
  auto base = small_series(24 * 10, 4);
  std::vector<double> load(base.load().begin(), base.load().end());
  std::vector<double> temp(base.temperature().begin(), base.temperature().end());
  load[100] = std::numeric_limits<double>::quiet_NaN();
  temp[150] = std::numeric_limits<double>::quiet_NaN();
  const HourlySeries s(base.grid(), load, temp);
  const auto eq = toy_equation();
  const auto rows = usable_rows(s, eq, -1);
  for (auto r : rows) {
    CHECK(r != 100);
    for (int k : {1, 2, 24}) CHECK(r - k != 100);
    for (int k : {1, 2, 3}) CHECK(r - k != 150);
  }
  CHECK(std::find(rows.begin(), rows.end(), 150) != rows.end());  // target load is present
  CHECK(std::find(rows.begin(), rows.end(), 124) == rows.end());
  CHECK(std::find(rows.begin(), rows.end(), 125) != rows.end());
}

TEST_CASE("standardization round trip against least squares") {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> z(0, 1);
  DesignMatrix dm;
  dm.n = 50;
  dm.p = 6;
  dm.values.resize(dm.n * dm.p);
  dm.meta.resize(dm.p);
  dm.response.resize(dm.n);
  Eigen::MatrixXd X(dm.n, 5);
  for (std::size_t j = 0; j < dm.p; ++j)
    for (std::size_t i = 0; i < dm.n; ++i) dm.values[j * dm.n + i] = j == 3 ? 7.0 : 3.0 * z(rng) + static_cast<double>(j);
  for (std::size_t i = 0; i < dm.n; ++i) {
    std::size_t c = 0;
    for (std::size_t j = 0; j < dm.p; ++j)
      if (j != 3) X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c++)) = dm.at(i, j);
    dm.response[i] = 2.0 + X.row(static_cast<Eigen::Index>(i)).sum() + z(rng);
  }
  for (std::size_t j = 0; j < dm.p; ++j) dm.meta[j].lag = static_cast<int>(j);
  const Eigen::Map<const Eigen::VectorXd> y0(dm.response.data(), static_cast<Eigen::Index>(dm.n));
  Eigen::MatrixXd A(dm.n, 6);
  A.col(0).setOnes();
  A.rightCols(5) = X;
  const Eigen::VectorXd ols = A.colPivHouseholderQr().solve(y0);

  const auto st = standardize(dm);
  CHECK(dm.p == 5);  // constant column removed
  REQUIRE(st.dropped.size() == 1);
  CHECK(st.dropped[0].lag == 3);
  for (std::size_t j = 0; j < dm.p; ++j) {
    double mean = 0, sq = 0;
    for (std::size_t i = 0; i < dm.n; ++i) mean += dm.at(i, j);
    mean /= static_cast<double>(dm.n);
    for (std::size_t i = 0; i < dm.n; ++i) sq += dm.at(i, j) * dm.at(i, j);
    CHECK(std::abs(mean) < 1e-12);
    CHECK(sq / static_cast<double>(dm.n) == doctest::Approx(1.0).epsilon(1e-12));
  }
  Eigen::Map<const Eigen::MatrixXd> Z(dm.values.data(), static_cast<Eigen::Index>(dm.n), 5);
  const Eigen::Map<const Eigen::VectorXd> ys(st.y.data(), static_cast<Eigen::Index>(dm.n));
  const Eigen::VectorXd bs = Z.colPivHouseholderQr().solve(ys);
  std::vector<double> bstd(bs.data(), bs.data() + bs.size());
  const auto slopes = st.slopes(bstd);
  CHECK(st.intercept(bstd) == doctest::Approx(ols(0)).epsilon(1e-10));
  for (int j = 0; j < 5; ++j) CHECK(slopes[static_cast<std::size_t>(j)] == doctest::Approx(ols(j + 1)).epsilon(1e-10));
}

TEST_CASE("degenerate designs are rejected") {
  DesignMatrix dm;
  dm.n = 1;
  dm.p = 1;
  dm.values = {1.0};
  dm.meta.resize(1);
  dm.response = {2.0};
  CHECK_THROWS_AS(standardize(dm), Error);
  DesignMatrix flat;
  flat.n = 3;
  flat.p = 1;
  flat.values = {1, 2, 3};
  flat.meta.resize(1);
  flat.response = {4, 4, 4};
  CHECK_THROWS_AS(standardize(flat), Error);
}
