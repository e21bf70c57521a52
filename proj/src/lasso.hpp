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

#ifndef LOADCAST_LASSO_HPP
#define LOADCAST_LASSO_HPP

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "design.hpp"

namespace loadcast {

// Objective throughout: (1/(2n)) * ||y - X b||^2 + lambda * ||b||_1.

/// Non-owning column-major n x p matrix.
struct MatrixView {
  const double* data = nullptr;
  std::size_t n = 0;
  std::size_t p = 0;

  const double* col(std::size_t j) const { return data + j * n; }
  static MatrixView of(const DesignMatrix& dm) { return {dm.values.data(), dm.n, dm.p}; }
};

struct LambdaGrid {
  std::vector<double> values;  // strictly decreasing
};

/// max_j |X_j . y| / n: the smallest lambda with an all-zero solution.
double lambda_max(MatrixView X, std::span<const double> y);

/// `size` values decaying exponentially from lambda_max to lambda_max * floor.
/// A zero lambda_max yields the single entry {0}.
LambdaGrid lambda_grid(MatrixView X, std::span<const double> y, std::size_t size = 100,
                       double floor = 1e-4);

struct CdOptions {
  double tol = 1e-7;                  // on max |coordinate change| * ||X_j|| / sqrt(n)
  std::size_t max_sweeps = 100000;
  bool trace_objective = false;
};

struct CdResult {
  std::size_t sweeps = 0;
  bool converged = false;
  double max_update = 0.0;
  std::vector<double> objective;  // after every sweep, when traced
};

/// Cyclic coordinate descent from the warm start in `beta`. `residual` must
/// equal y - X beta on entry and is kept in sync.
CdResult coordinate_descent(MatrixView X, std::span<const double> y, double lambda,
                            std::vector<double>& beta, std::vector<double>& residual,
                            const CdOptions& options = {});

/// Cold-start convenience wrapper.
std::vector<double> lasso_solve(MatrixView X, std::span<const double> y, double lambda,
                                const CdOptions& options = {});

double lasso_objective(MatrixView X, std::span<const double> y, std::span<const double> beta,
                       double lambda);

/// Largest breach of the optimality conditions: |g_j - lambda sign(b_j)| for
/// nonzero b_j and max(0, |g_j| - lambda) otherwise, g = X'(y - X b)/n.
double kkt_violation(MatrixView X, std::span<const double> y, std::span<const double> beta,
                     double lambda);

struct PathPoint {
  double lambda = 0.0;
  double bic = 0.0;
  double rss = 0.0;  // on the scale of the supplied problem
  std::size_t nonzero = 0;
  std::size_t sweeps = 0;
  bool converged = true;
};

struct PathFit {
  std::vector<double> beta;  // at the chosen lambda
  std::vector<double> residual;
  double lambda = 0.0;
  std::size_t chosen = 0;
  std::vector<PathPoint> trace;
  bool stopped_early = false;  // support reached n - 1
};

/// Warm-started path along the grid; picks the lambda of minimal
/// BIC = n ln(RSS/n) + k ln n, ties to the larger lambda.
PathFit fit_path_bic(MatrixView X, std::span<const double> y, const LambdaGrid& grid,
                     const CdOptions& options = {});

struct LassoOptions {
  std::size_t grid_size = 100;
  double grid_floor = 1e-4;
  CdOptions cd;
};

/// BIC-tuned lasso fit of one equation, standardized and back-transformed.
struct LassoFit {
  Channel target = Channel::Load;
  std::size_t n = 0;
  std::size_t p = 0;  // retained columns
  std::vector<ColumnMeta> meta;
  std::vector<ColumnMeta> dropped;
  std::vector<double> beta_std;
  std::vector<double> beta_orig;
  double intercept = 0.0;
  double lambda = 0.0;
  std::size_t lambda_index = 0;
  double y_scale = 1.0;
  std::vector<PathPoint> bic_trace;  // standardized scale
  std::vector<std::int64_t> rows;
  std::vector<double> residuals;  // original scale
  bool stopped_early = false;

  std::size_t nonzero() const;
};

/// Standardizes `dm` in place and fits it.
LassoFit fit_lasso(DesignMatrix& dm, const LassoOptions& options = {});

inline constexpr std::array<double, 4> kRefitLambdas = {0.25, 0.125, 0.0625, 0.03125};

struct RefitProfile {
  double lambda = 0.0;
  std::size_t nonzero = 0;
  std::array<double, 168> profile{};  // fitted value per hour of the week
};

/// Load regressed on the G1 and G2 indicators alone, at each lambda
/// (standardized scale). Profiles run from Sunday 00:00.
std::vector<RefitProfile> refit_demo(const HourlySeries& series,
                                     std::span<const double> lambdas = kRefitLambdas);

}  // namespace loadcast

#endif  // LOADCAST_LASSO_HPP
