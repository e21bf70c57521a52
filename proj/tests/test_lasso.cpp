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

#include "error.hpp"
#include "lasso.hpp"
#include "synth.hpp"

using namespace loadcast;

namespace {

struct Problem {
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
  MatrixView view() const { return {X.data(), static_cast<std::size_t>(X.rows()), static_cast<std::size_t>(X.cols())}; }
  std::span<const double> yspan() const { return {y.data(), static_cast<std::size_t>(y.size())}; }
};

Problem random_problem(std::mt19937_64& rng, int n, int p) {
  std::normal_distribution<double> z(0, 1);
  Problem pr{Eigen::MatrixXd(n, p), Eigen::VectorXd(n)};
  for (int j = 0; j < p; ++j)
    for (int i = 0; i < n; ++i) pr.X(i, j) = z(rng);
  for (int j = 0; j < p; ++j) {
    pr.X.col(j).array() -= pr.X.col(j).mean();
    pr.X.col(j) /= std::sqrt(pr.X.col(j).squaredNorm() / n);
  }
  Eigen::VectorXd b = Eigen::VectorXd::Zero(p);
  for (int j = 0; j < p; j += 2) b(j) = z(rng);
  pr.y = pr.X * b;
  for (int i = 0; i < n; ++i) pr.y(i) += 0.5 * z(rng);
  pr.y.array() -= pr.y.mean();
  return pr;
}

double soft(double z, double g) { return z > g ? z - g : (z < -g ? z + g : 0.0); }

}  // namespace

TEST_CASE("lambda zero reproduces least squares") {
  std::mt19937_64 rng(1);
  CdOptions tight;
  tight.tol = 1e-12;
  for (int rep = 0; rep < 5; ++rep) {
    const auto pr = random_problem(rng, 50, 10);
    const Eigen::VectorXd ols = pr.X.colPivHouseholderQr().solve(pr.y);
    const auto b = lasso_solve(pr.view(), pr.yspan(), 0.0, tight);
    for (int j = 0; j < 10; ++j) CHECK(std::abs(b[static_cast<std::size_t>(j)] - ols(j)) < 1e-6);
  }
}

TEST_CASE("orthonormal design reduces to soft thresholding") {
  std::mt19937_64 rng(2);
  const int n = 50, p = 10;
  Eigen::MatrixXd G(n, p);
  std::normal_distribution<double> z(0, 1);
  for (int j = 0; j < p; ++j)
    for (int i = 0; i < n; ++i) G(i, j) = z(rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(G);
  const Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(n, p) * std::sqrt(static_cast<double>(n));
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) y(i) = 3 * z(rng);
  const MatrixView X{Q.data(), static_cast<std::size_t>(n), static_cast<std::size_t>(p)};
  const std::span<const double> ys(y.data(), static_cast<std::size_t>(n));
  for (double lambda : {0.0, 0.1, 0.5, 1.0, 3.0}) {
    const auto b = lasso_solve(X, ys, lambda);
    for (int j = 0; j < p; ++j) {
      const double zj = Q.col(j).dot(y) / n;
      CHECK(std::abs(b[static_cast<std::size_t>(j)] - soft(zj, lambda)) < 1e-8);
    }
  }
}

TEST_CASE("kkt conditions and objective descent") {
  std::mt19937_64 rng(3);
  for (int rep = 0; rep < 5; ++rep) {
    const auto pr = random_problem(rng, 50, 10);
    const double lmax = lambda_max(pr.view(), pr.yspan());
    for (double frac : {0.9, 0.5, 0.1, 0.01}) {
      const double lambda = frac * lmax;
      std::vector<double> beta(10, 0.0);
      std::vector<double> res(pr.y.data(), pr.y.data() + 50);
      CdOptions o;
      o.trace_objective = true;
      const auto r = coordinate_descent(pr.view(), pr.yspan(), lambda, beta, res, o);
      CHECK(r.converged);
      CHECK(kkt_violation(pr.view(), pr.yspan(), beta, lambda) < 1e-6);
      for (std::size_t s = 1; s < r.objective.size(); ++s) CHECK(r.objective[s] <= r.objective[s - 1] + 1e-14);
      // Residual bookkeeping matches a direct recomputation.
      Eigen::Map<const Eigen::VectorXd> bv(beta.data(), 10);
      const Eigen::VectorXd direct = pr.y - pr.X * bv;
      for (int i = 0; i < 50; ++i) CHECK(std::abs(res[static_cast<std::size_t>(i)] - direct(i)) < 1e-10);
      // Warm start agrees with a cold start.
      const auto cold = lasso_solve(pr.view(), pr.yspan(), lambda);
      for (int j = 0; j < 10; ++j) CHECK(std::abs(cold[static_cast<std::size_t>(j)] - beta[static_cast<std::size_t>(j)]) < 1e-6);
    }
  }
}

TEST_CASE("lambda max zeroes every coefficient") {
  std::mt19937_64 rng(4);
  const auto pr = random_problem(rng, 60, 8);
  const double lmax = lambda_max(pr.view(), pr.yspan());
  const auto at = lasso_solve(pr.view(), pr.yspan(), lmax);
  for (double b : at) CHECK(b == 0.0);
  const auto below = lasso_solve(pr.view(), pr.yspan(), 0.99 * lmax);
  std::size_t nz = 0;
  for (double b : below) nz += b != 0.0;
  CHECK(nz >= 1);

  const auto grid = lambda_grid(pr.view(), pr.yspan());
  REQUIRE(grid.values.size() == 100);
  CHECK(grid.values.front() == doctest::Approx(lmax));
  CHECK(grid.values.back() == doctest::Approx(1e-4 * lmax));
  for (std::size_t k = 1; k < 100; ++k) CHECK(grid.values[k] < grid.values[k - 1]);
  const std::vector<double> zero(60, 0.0);
  CHECK_THROWS_AS(lambda_grid(pr.view(), zero), Error);
}

TEST_CASE("bic path favours sparse truth and rss shrinks with lambda") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> z(0, 1);
  const int n = 400, p = 30;
  Problem pr{Eigen::MatrixXd(n, p), Eigen::VectorXd(n)};
  for (int j = 0; j < p; ++j)
    for (int i = 0; i < n; ++i) pr.X(i, j) = z(rng);
  for (int i = 0; i < n; ++i) pr.y(i) = 2 * pr.X(i, 0) - 1.5 * pr.X(i, 5) + pr.X(i, 9) + 0.5 * z(rng);
  const auto grid = lambda_grid(pr.view(), pr.yspan());
  const auto fit = fit_path_bic(pr.view(), pr.yspan(), grid);
  CHECK(fit.beta[0] > 1.5);
  CHECK(fit.beta[5] < -1.0);
  CHECK(fit.beta[9] > 0.5);
  std::size_t extra = 0;
  for (int j = 0; j < p; ++j)
    if (j != 0 && j != 5 && j != 9 && fit.beta[static_cast<std::size_t>(j)] != 0.0) ++extra;
  CHECK(extra <= 3);
  for (std::size_t k = 1; k < fit.trace.size(); ++k) CHECK(fit.trace[k].rss <= fit.trace[k - 1].rss * (1 + 1e-9));
  const auto& chosen = fit.trace[fit.chosen];
  for (const auto& pt : fit.trace) CHECK(pt.bic >= chosen.bic);

  // Pure noise: the empty or a nearly empty model wins.
  for (int i = 0; i < n; ++i) pr.y(i) = z(rng);
  pr.y.array() -= pr.y.mean();
  const auto noise = fit_path_bic(pr.view(), pr.yspan(), lambda_grid(pr.view(), pr.yspan()));
  std::size_t nz = 0;
  for (double b : noise.beta) nz += b != 0.0;
  CHECK(nz <= 2);
}

TEST_CASE("path stops once support reaches n - 1") {
  std::mt19937_64 rng(6);
  std::normal_distribution<double> z(0, 1);
  const int n = 12, p = 40;
  Problem pr{Eigen::MatrixXd(n, p), Eigen::VectorXd(n)};
  for (int j = 0; j < p; ++j)
    for (int i = 0; i < n; ++i) pr.X(i, j) = z(rng);
  for (int i = 0; i < n; ++i) pr.y(i) = z(rng);
  const auto fit = fit_path_bic(pr.view(), pr.yspan(), lambda_grid(pr.view(), pr.yspan()));
  CHECK(fit.stopped_early);
  CHECK(fit.trace.back().nonzero >= static_cast<std::size_t>(n - 1));
  CHECK(fit.trace.size() < 100);
}

TEST_CASE("refit profiles grow with smaller lambda") {
  std::mt19937_64 rng(8);
  const std::size_t n = 24 * 7 * 20;
  const HourGrid g(CivilHour{2011, 8, 14, 0}, n);
  std::vector<double> load(n);
  std::normal_distribution<double> z(0, 1);
  for (std::size_t i = 0; i < n; ++i) {
    const auto st = g.stamp_of(static_cast<std::int64_t>(i));
    const int how = hour_of_week(st);
    load[i] = 100 + 20 * std::sin(2 * synth::kPi * how / 24.0) + (how > 24 ? 10 : 0) + z(rng);
  }
  const HourlySeries s(g, load, std::vector<double>(n, 50.0));
  const auto profiles = refit_demo(s);
  REQUIRE(profiles.size() == 4);
  for (std::size_t k = 1; k < 4; ++k) {
    CHECK(profiles[k].lambda < profiles[k - 1].lambda);
    CHECK(profiles[k].nonzero >= profiles[k - 1].nonzero);
  }
  // The least penalized fit tracks the weekly shape.
  const auto& last = profiles.back().profile;
  CHECK(last[6] > last[18] + 20);
}
