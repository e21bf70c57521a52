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

#include "lasso.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <limits>

#include "error.hpp"

namespace loadcast {

namespace {

using CVec = Eigen::Map<const Eigen::VectorXd>;
using Vec = Eigen::Map<Eigen::VectorXd>;

CVec column(MatrixView X, std::size_t j) {
  return CVec(X.col(j), static_cast<Eigen::Index>(X.n));
}

double soft_threshold(double z, double g) {
  if (z > g) return z - g;
  if (z < -g) return z + g;
  return 0.0;
}

void check_shapes(MatrixView X, std::size_t ny, std::size_t nb) {
  if (ny != X.n) fail(ErrorKind::InvalidArgument, "response length does not match the design");
  if (nb != X.p) fail(ErrorKind::InvalidArgument, "coefficient length does not match the design");
}

// Above this width the Gram cache could reach p^2 doubles; sweeps then
// update the residual directly.
constexpr std::size_t kCovarianceMaxColumns = 4096;

// State of one coordinate-descent problem. Column norms are computed once.
// In covariance mode the gradient x_j.r/n is kept per coordinate and updated
// through cached Gram columns of the coordinates that have moved, so an
// update costs O(p) instead of O(n); the residual is rebuilt exactly before
// convergence is declared.
class Solver {
 public:
  explicit Solver(MatrixView X)
      : X_(X), norm_(X.p), covariance_(X.p <= kCovarianceMaxColumns && X.p < X.n), gram_(covariance_ ? X.p : 0) {
    const double n = static_cast<double>(X.n);
    for (std::size_t j = 0; j < X.p; ++j) norm_[j] = column(X, j).squaredNorm() / n;
  }

  CdResult run(double lambda, std::vector<double>& beta, std::vector<double>& r, const CdOptions& opt) {
    CdResult res;
    std::vector<std::size_t> all(X_.p);
    for (std::size_t j = 0; j < X_.p; ++j) all[j] = j;
    std::vector<std::size_t> active;
    std::vector<double> synced(beta);
    if (covariance_) gradient(r);
    auto sync = [&] {
      if (!covariance_) return;
      Vec rv(r.data(), static_cast<Eigen::Index>(r.size()));
      for (std::size_t j = 0; j < X_.p; ++j) {
        const double d = beta[j] - synced[j];
        if (d != 0.0) rv.noalias() -= d * column(X_, j);
      }
      synced = beta;
      gradient(r);
    };
    auto record = [&] {
      if (!opt.trace_objective) return;
      sync();
      res.objective.push_back(objective(lambda, beta, r));
    };
    auto step = [&](const std::vector<std::size_t>& coords) {
      const double d = sweep(coords, lambda, beta, r);
      ++res.sweeps;
      record();
      res.max_update = d;
      return d;
    };
    while (res.sweeps < opt.max_sweeps) {
      double delta = step(all);
      if (delta < opt.tol) {
        if (!covariance_) {
          res.converged = true;
          break;
        }
        // Confirm against the exact residual.
        sync();
        if (res.sweeps >= opt.max_sweeps) break;
        delta = step(all);
        if (delta < opt.tol) {
          res.converged = true;
          break;
        }
      }
      active.clear();
      for (std::size_t j = 0; j < X_.p; ++j)
        if (beta[j] != 0.0) active.push_back(j);
      while (res.sweeps < opt.max_sweeps) {
        if (step(active) < opt.tol) break;
      }
    }
    sync();
    return res;
  }

  double objective(double lambda, std::span<const double> beta, std::span<const double> r) const {
    const double rss = CVec(r.data(), static_cast<Eigen::Index>(r.size())).squaredNorm();
    double l1 = 0.0;
    for (double b : beta) l1 += std::abs(b);
    return rss / (2.0 * static_cast<double>(X_.n)) + lambda * l1;
  }

 private:
  void gradient(std::span<const double> r) {
    const CVec rv(r.data(), static_cast<Eigen::Index>(r.size()));
    const double n = static_cast<double>(X_.n);
    grad_.resize(X_.p);
    for (std::size_t j = 0; j < X_.p; ++j) grad_[j] = column(X_, j).dot(rv) / n;
  }

  // x_k.x_j / n for all k.
  const std::vector<double>& gram(std::size_t j) {
    auto& g = gram_[j];
    if (g.empty()) {
      const double n = static_cast<double>(X_.n);
      g.resize(X_.p);
      const auto xj = column(X_, j);
      for (std::size_t k = 0; k < X_.p; ++k)
        g[k] = !gram_[k].empty() && k != j ? gram_[k][j] : column(X_, k).dot(xj) / n;
    }
    return g;
  }

  double sweep(const std::vector<std::size_t>& coords, double lambda, std::vector<double>& beta,
               std::vector<double>& r) {
    const double n = static_cast<double>(X_.n);
    Vec rv(r.data(), static_cast<Eigen::Index>(r.size()));
    double max_delta = 0.0;
    for (std::size_t j : coords) {
      const double c = norm_[j];
      if (c <= 0.0) {
        beta[j] = 0.0;
        continue;
      }
      const double gj = covariance_ ? grad_[j] : column(X_, j).dot(rv) / n;
      const double b = soft_threshold(gj + c * beta[j], lambda) / c;
      const double d = b - beta[j];
      if (d == 0.0) continue;
      if (covariance_) {
        Vec(grad_.data(), static_cast<Eigen::Index>(X_.p)).noalias() -=
            d * CVec(gram(j).data(), static_cast<Eigen::Index>(X_.p));
      } else {
        rv.noalias() -= d * column(X_, j);
      }
      beta[j] = b;
      max_delta = std::max(max_delta, std::abs(d) * std::sqrt(c));
    }
    return max_delta;
  }

  MatrixView X_;
  std::vector<double> norm_;
  bool covariance_;
  std::vector<std::vector<double>> gram_;
  std::vector<double> grad_;
};

std::vector<double> residual_of(MatrixView X, std::span<const double> y,
                                std::span<const double> beta) {
  std::vector<double> r(y.begin(), y.end());
  Vec rv(r.data(), static_cast<Eigen::Index>(r.size()));
  for (std::size_t j = 0; j < X.p; ++j)
    if (beta[j] != 0.0) rv.noalias() -= beta[j] * column(X, j);
  return r;
}

}  // namespace

double lambda_max(MatrixView X, std::span<const double> y) {
  check_shapes(X, y.size(), X.p);
  const CVec yv(y.data(), static_cast<Eigen::Index>(y.size()));
  double m = 0.0;
  for (std::size_t j = 0; j < X.p; ++j) m = std::max(m, std::abs(column(X, j).dot(yv)));
  return m / static_cast<double>(X.n);
}

LambdaGrid lambda_grid(MatrixView X, std::span<const double> y, std::size_t size, double floor) {
  if (size == 0) fail(ErrorKind::InvalidArgument, "lambda grid needs at least one value");
  if (!(floor > 0.0 && floor < 1.0)) fail(ErrorKind::InvalidArgument, "lambda floor must be in (0, 1)");
  double ss = 0.0;
  for (double v : y) ss += v * v;
  if (ss == 0.0) fail(ErrorKind::Data, "zero response");
  const double top = lambda_max(X, y);
  LambdaGrid g;
  if (top == 0.0) {
    g.values = {0.0};
    return g;
  }
  g.values.resize(size);
  const double step = size > 1 ? std::log(floor) / static_cast<double>(size - 1) : 0.0;
  for (std::size_t i = 0; i < size; ++i) g.values[i] = top * std::exp(step * static_cast<double>(i));
  g.values[0] = top;
  return g;
}

CdResult coordinate_descent(MatrixView X, std::span<const double> y, double lambda,
                            std::vector<double>& beta, std::vector<double>& residual,
                            const CdOptions& options) {
  check_shapes(X, y.size(), beta.size());
  if (residual.size() != X.n) fail(ErrorKind::InvalidArgument, "residual length mismatch");
  if (lambda < 0.0) fail(ErrorKind::InvalidArgument, "lambda must be non-negative");
  Solver s(X);
  CdResult res = s.run(lambda, beta, residual, options);
  if (!res.converged) {
    log(LogLevel::Warning, "coordinate descent did not converge at lambda " + std::to_string(lambda) +
                               " after " + std::to_string(res.sweeps) +
                               " sweeps (max update " + std::to_string(res.max_update) + ")");
  }
  return res;
}

std::vector<double> lasso_solve(MatrixView X, std::span<const double> y, double lambda,
                                const CdOptions& options) {
  std::vector<double> beta(X.p, 0.0);
  std::vector<double> r(y.begin(), y.end());
  coordinate_descent(X, y, lambda, beta, r, options);
  return beta;
}

double lasso_objective(MatrixView X, std::span<const double> y, std::span<const double> beta,
                       double lambda) {
  check_shapes(X, y.size(), beta.size());
  const auto r = residual_of(X, y, beta);
  double rss = 0.0;
  for (double v : r) rss += v * v;
  double l1 = 0.0;
  for (double b : beta) l1 += std::abs(b);
  return rss / (2.0 * static_cast<double>(X.n)) + lambda * l1;
}

double kkt_violation(MatrixView X, std::span<const double> y, std::span<const double> beta,
                     double lambda) {
  check_shapes(X, y.size(), beta.size());
  const auto r = residual_of(X, y, beta);
  const CVec rv(r.data(), static_cast<Eigen::Index>(r.size()));
  double worst = 0.0;
  for (std::size_t j = 0; j < X.p; ++j) {
    const double g = column(X, j).dot(rv) / static_cast<double>(X.n);
    const double v = beta[j] != 0.0 ? std::abs(g - lambda * (beta[j] > 0 ? 1.0 : -1.0))
                                    : std::max(0.0, std::abs(g) - lambda);
    worst = std::max(worst, v);
  }
  return worst;
}

PathFit fit_path_bic(MatrixView X, std::span<const double> y, const LambdaGrid& grid,
                     const CdOptions& options) {
  check_shapes(X, y.size(), X.p);
  if (grid.values.empty()) fail(ErrorKind::InvalidArgument, "empty lambda grid");
  const double n = static_cast<double>(X.n);
  Solver s(X);
  std::vector<double> beta(X.p, 0.0);
  std::vector<double> r(y.begin(), y.end());
  PathFit out;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grid.values.size(); ++i) {
    const double lambda = grid.values[i];
    const CdResult res = s.run(lambda, beta, r, options);
    if (!res.converged) {
      log(LogLevel::Warning, "lasso path: no convergence at lambda " + std::to_string(lambda) +
                                 " (max update " + std::to_string(res.max_update) + ")");
    }
    PathPoint pt;
    pt.lambda = lambda;
    pt.sweeps = res.sweeps;
    pt.converged = res.converged;
    for (double b : beta) pt.nonzero += b != 0.0;
    for (double v : r) pt.rss += v * v;
    const double rss = std::max(pt.rss, std::numeric_limits<double>::min());
    pt.bic = n * std::log(rss / n) + static_cast<double>(pt.nonzero) * std::log(n);
    out.trace.push_back(pt);
    if (pt.bic < best) {
      best = pt.bic;
      out.chosen = i;
      out.lambda = lambda;
      out.beta = beta;
      out.residual = r;
    }
    if (pt.nonzero + 1 >= X.n) {
      out.stopped_early = i + 1 < grid.values.size();
      break;
    }
  }
  for (std::size_t i = 1; i < out.trace.size() && i < 10; ++i) {
    if (out.trace[i].nonzero < out.trace[i - 1].nonzero) {
      log(LogLevel::Debug, "lasso path: support shrank between lambda " + std::to_string(i - 1) +
                               " and " + std::to_string(i));
    }
  }
  return out;
}

std::size_t LassoFit::nonzero() const {
  std::size_t k = 0;
  for (double b : beta_std) k += b != 0.0;
  return k;
}

LassoFit fit_lasso(DesignMatrix& dm, const LassoOptions& options) {
  const Standardization st = standardize(dm);
  LassoFit fit;
  fit.target = dm.target;
  fit.n = dm.n;
  fit.p = dm.p;
  fit.rows = dm.rows;
  fit.dropped = st.dropped;
  fit.y_scale = st.y_scale;
  if (dm.p == 0) {
    fit.intercept = st.y_center;
    fit.residuals.resize(dm.n);
    for (std::size_t i = 0; i < dm.n; ++i) fit.residuals[i] = dm.response[i] - st.y_center;
    return fit;
  }
  const MatrixView X = MatrixView::of(dm);
  const LambdaGrid grid = lambda_grid(X, st.y, options.grid_size, options.grid_floor);
  PathFit path = fit_path_bic(X, st.y, grid, options.cd);
  fit.meta = dm.meta;
  fit.beta_std = std::move(path.beta);
  fit.beta_orig = st.slopes(fit.beta_std);
  fit.intercept = st.intercept(fit.beta_std);
  fit.lambda = path.lambda;
  fit.lambda_index = path.chosen;
  fit.bic_trace = std::move(path.trace);
  fit.stopped_early = path.stopped_early;
  fit.residuals.resize(dm.n);
  for (std::size_t i = 0; i < dm.n; ++i) fit.residuals[i] = st.y_scale * path.residual[i];
  return fit;
}

std::vector<RefitProfile> refit_demo(const HourlySeries& series, std::span<const double> lambdas) {
  EquationSpec eq;
  eq.target = Channel::Load;
  eq.intercept_groups = {BasisGroup::G1, BasisGroup::G2};
  auto ctx = std::make_shared<BasisContext>();
  const EquationBases bases(eq, ctx);
  DesignMatrix dm = build_design(series, eq, bases);
  const Standardization st = standardize(dm);
  const MatrixView X = MatrixView::of(dm);

  // Indicator rows of a Sunday-through-Saturday week, in retained-column order.
  const HourGrid week(CivilHour{2012, 1, 1, 0}, 168);
  std::vector<std::vector<double>> rows(168);
  for (int h = 0; h < 168; ++h) rows[static_cast<std::size_t>(h)] = bases.intercept.evaluate(week.stamp_of(h));

  std::vector<double> order(lambdas.begin(), lambdas.end());
  std::vector<std::size_t> idx(order.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return order[a] > order[b]; });

  std::vector<RefitProfile> out(order.size());
  std::vector<double> beta(dm.p, 0.0);
  std::vector<double> r = st.y;
  for (std::size_t i : idx) {
    coordinate_descent(X, st.y, order[i], beta, r);
    RefitProfile prof;
    prof.lambda = order[i];
    for (double b : beta) prof.nonzero += b != 0.0;
    const auto slope = st.slopes(beta);
    const double c0 = st.intercept(beta);
    for (int h = 0; h < 168; ++h) {
      double v = c0;
      for (std::size_t j = 0; j < dm.p; ++j)
        v += slope[j] * rows[static_cast<std::size_t>(h)][static_cast<std::size_t>(dm.meta[j].basis_slot)];
      prof.profile[static_cast<std::size_t>(h)] = v;
    }
    out[i] = prof;
  }
  return out;
}

}  // namespace loadcast
