/*
 * Copyright 2026 The jointfx Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *   http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "jointfx/identify2.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "jointfx/io.hpp"
#include "jointfx/stats.hpp"

namespace jointfx {
namespace {

void require_three_columns(const RegimeDataset& data) {
  if (data.values.cols() != 3) throw StructuralError("two-treatment identification expects columns X1, X2, Y");
}

void require_single(const RegimeDataset& data, std::size_t target) {
  if (data.regime.kind != Regime::Kind::single_intervention || data.regime.targets.at(0) != target) {
    throw StructuralError("dataset is not a do(X" + std::to_string(target + 1) + ") regime");
  }
}

std::vector<double> to_vector(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

/// Univariate quadratic regression; returns (c0, c1, c2).
Eigen::Vector3d fit_quadratic(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  Eigen::MatrixXd design(x.size(), 3);
  design.col(0).setOnes();
  design.col(1) = x;
  design.col(2) = x.array().square().matrix();
  return least_squares(design, y);
}

double eval_quadratic(const Eigen::Vector3d& c, double x) { return c[0] + x * (c[1] + x * c[2]); }

PolynomialEquation fit_two_parent(const Eigen::MatrixXd& values, const std::string& child) {
  const Eigen::VectorXd beta = least_squares(feature_matrix(values.leftCols(2)), values.col(2));
  return PolynomialEquation(child, {"X1", "X2"}, to_vector(beta));
}

std::vector<double> grid_between(const Eigen::VectorXd& column, const CrossRegimeOptions& options) {
  if (options.grid_points < 2) throw std::invalid_argument("the evaluation grid needs at least two points");
  const auto values = to_vector(column);
  const double lo = quantile(values, options.lower_quantile);
  const double hi = quantile(values, options.upper_quantile);
  std::vector<double> grid(options.grid_points);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    grid[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(grid.size() - 1);
  }
  return grid;
}

void check_overlap(const std::vector<double>& grid, const Eigen::VectorXd& support, const std::string& what) {
  const double lo = support.minCoeff();
  const double hi = support.maxCoeff();
  std::vector<double> uncovered;
  for (double g : grid) {
    if (g < lo || g > hi) uncovered.push_back(g);
  }
  if (uncovered.empty()) return;
  std::ostringstream msg;
  msg << "insufficient overlap: " << uncovered.size() << " grid point(s) outside the observed range of " << what
      << " [" << format_number(lo) << ", " << format_number(hi) << "]:";
  for (double g : uncovered) msg << ' ' << format_number(g);
  throw InsufficientOverlap(msg.str(), std::move(uncovered));
}

double slope_of(const std::vector<double>& x, const std::vector<double>& y) {
  const double mx = mean(x);
  const double my = mean(y);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  if (!(sxx > 0.0)) throw NumericalError("evaluation grid has zero spread");
  return sxy / sxx;
}

}  // namespace

PolynomialEquation estimate_f2(const RegimeDataset& d1) {
  require_three_columns(d1);
  require_single(d1, 0);
  const Eigen::VectorXd beta = least_squares(feature_matrix(d1.values.col(0)), d1.values.col(1));
  return PolynomialEquation("X2", {"X1"}, to_vector(beta));
}

NoiseGeometry residual_noise_cov(const RegimeDataset& d_obs, const PolynomialEquation& f2) {
  require_three_columns(d_obs);
  if (!d_obs.regime.is_observational()) throw StructuralError("noise geometry needs observational data");
  const Eigen::Index n = d_obs.values.rows();
  if (n < 3) throw NumericalError("noise geometry needs at least three observational rows");
  Eigen::MatrixXd u(n, 2);
  u.col(0) = d_obs.values.col(0);
  for (Eigen::Index r = 0; r < n; ++r) {
    const double x1 = d_obs.values(r, 0);
    u(r, 1) = d_obs.values(r, 1) - f2.evaluate(std::span<const double>(&x1, 1));
  }
  const Eigen::MatrixXd centered = u.rowwise() - u.colwise().mean();
  NoiseGeometry geometry;
  geometry.sigma_ux = centered.transpose() * centered / static_cast<double>(n - 1);
  geometry.u2_samples = to_vector(u.col(1));
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(geometry.sigma_ux);
  const double scale = std::max(1.0, geometry.sigma_ux.diagonal().maxCoeff());
  geometry.degenerate = eig.eigenvalues()[0] < 1e-10 * scale;
  return geometry;
}

CrossRegimeSigma cross_regime_sigma(const RegimeDataset& d_obs, const RegimeDataset& d1, const RegimeDataset& d2,
                                    const PolynomialEquation& f2, const NoiseGeometry& geometry,
                                    const CrossRegimeOptions& options) {
  require_three_columns(d_obs);
  require_three_columns(d1);
  require_three_columns(d2);
  require_single(d1, 0);
  require_single(d2, 1);
  if (geometry.u2_samples.empty()) throw StructuralError("noise geometry carries no U2 sample");

  CrossRegimeSigma out;

  // sigma_y1: E[Y | X1, do(X2)] averaged over p(U2) at x2 = f2(x1) + u2,
  // minus E[Y | do(X1)], equals E[U_Y | U1 = x1].
  out.grid1 = grid_between(d_obs.values.col(0), options);
  check_overlap(out.grid1, d1.values.col(0), "the do(X1) levels");
  check_overlap(out.grid1, d2.values.col(0), "X1 under do(X2)");
  const Eigen::Vector3d g1 = fit_quadratic(d1.values.col(0), d1.values.col(2));
  const PolynomialEquation h = fit_two_parent(d2.values, "Y");
  for (double x1 : out.grid1) {
    const double base = f2.evaluate(std::span<const double>(&x1, 1));
    double acc = 0.0;
    for (double u2 : geometry.u2_samples) {
      const double args[2] = {x1, base + u2};
      acc += h.evaluate(args);
    }
    out.contrast1.push_back(acc / static_cast<double>(geometry.u2_samples.size()) - eval_quadratic(g1, x1));
  }
  out.slope1 = slope_of(out.grid1, out.contrast1);
  out.sigma_y1 = out.slope1 * geometry.sigma_ux(0, 0);

  // sigma_y2: E[Y | do(X1), X2] averaged over p(U1), minus E[Y | do(X2)],
  // is affine in x2 with slope Cov(U_Y, U2) / Var(U2).
  out.grid2 = grid_between(d_obs.values.col(1), options);
  check_overlap(out.grid2, d2.values.col(1), "the do(X2) levels");
  check_overlap(out.grid2, d1.values.col(1), "X2 under do(X1)");
  const Eigen::Vector3d g2 = fit_quadratic(d2.values.col(1), d2.values.col(2));
  const PolynomialEquation k1 = fit_two_parent(d1.values, "Y");
  const Eigen::VectorXd u1 = d_obs.values.col(0);
  for (double x2 : out.grid2) {
    double acc = 0.0;
    for (Eigen::Index r = 0; r < u1.size(); ++r) {
      const double args[2] = {u1[r], x2};
      acc += k1.evaluate(args);
    }
    out.contrast2.push_back(acc / static_cast<double>(u1.size()) - eval_quadratic(g2, x2));
  }
  out.slope2 = slope_of(out.grid2, out.contrast2);
  out.sigma_y2 = out.slope2 * geometry.sigma_ux(1, 1);
  return out;
}

double conditional_noise_mean(const NoiseGeometry& geometry, const Eigen::Vector2d& u_x) {
  const Eigen::LLT<Eigen::Matrix2d> llt(geometry.sigma_ux);
  const double scale = std::max(1.0, geometry.sigma_ux.diagonal().cwiseAbs().maxCoeff());
  if (llt.info() != Eigen::Success || geometry.sigma_ux.determinant() < 1e-12 * scale * scale) {
    throw NumericalError("sigma_ux is singular");
  }
  const Eigen::RowVector2d weights = llt.solve(geometry.sigma_uy.transpose()).transpose();
  return weights * u_x;
}

double conditional_noise_mean(const NoiseGeometry& geometry, double x1, double x2, const PolynomialEquation& f2) {
  return conditional_noise_mean(geometry, Eigen::Vector2d(x1, x2 - f2.evaluate(std::span<const double>(&x1, 1))));
}

JointEffectSurface::JointEffectSurface(PolynomialEquation observational, NoiseGeometry geometry,
                                       PolynomialEquation f2)
    : observational_(std::move(observational)), geometry_(std::move(geometry)), f2_(std::move(f2)) {
  if (observational_.parents().size() != 2 || f2_.parents().size() != 1) {
    throw StructuralError("surface needs a two-parent regression and a one-parent f2");
  }
}

double JointEffectSurface::operator()(double x1, double x2) const {
  const double args[2] = {x1, x2};
  return observational_.evaluate(args) - conditional_noise_mean(geometry_, x1, x2, f2_);
}

PolynomialEquation JointEffectSurface::as_equation() const {
  // The correction is w1*x1 + w2*(x2 - a - b*x1) with f2 = a + b*x1.
  const double w1 = conditional_noise_mean(geometry_, Eigen::Vector2d(1.0, 0.0));
  const double w2 = conditional_noise_mean(geometry_, Eigen::Vector2d(0.0, 1.0));
  const double a = f2_.coefficients()[0];
  const double b = f2_.coefficients()[1];
  std::vector<double> c = observational_.coefficients();
  c[0] += w2 * a;
  c[1] -= w1 - w2 * b;
  c[2] -= w2;
  return observational_.with_coefficients(std::move(c));
}

JointEffectSurface constructive_fY(const RegimeDataset& d_obs, const NoiseGeometry& geometry,
                                   const PolynomialEquation& f2) {
  require_three_columns(d_obs);
  if (!d_obs.regime.is_observational()) throw StructuralError("surface regression needs observational data");
  return JointEffectSurface(fit_two_parent(d_obs.values, "Y"), geometry, f2);
}

Identify2Result identify2(std::span<const RegimeDataset> datasets, const CrossRegimeOptions& options) {
  const RegimeDataset* obs = nullptr;
  const RegimeDataset* d1 = nullptr;
  const RegimeDataset* d2 = nullptr;
  for (const auto& ds : datasets) {
    const RegimeDataset** slot = nullptr;
    if (ds.regime.is_observational()) {
      slot = &obs;
    } else if (ds.regime.kind == Regime::Kind::single_intervention && ds.regime.targets.at(0) == 0) {
      slot = &d1;
    } else if (ds.regime.kind == Regime::Kind::single_intervention && ds.regime.targets.at(0) == 1) {
      slot = &d2;
    } else {
      throw StructuralError("unexpected regime for two-treatment identification");
    }
    if (*slot != nullptr) throw StructuralError("duplicate regime for two-treatment identification");
    *slot = &ds;
  }
  if (!obs || !d1 || !d2) throw StructuralError("two-treatment identification needs obs, do:X1 and do:X2 data");

  PolynomialEquation f2 = estimate_f2(*d1);
  NoiseGeometry geometry = residual_noise_cov(*obs, f2);
  CrossRegimeSigma cross = cross_regime_sigma(*obs, *d1, *d2, f2, geometry, options);
  geometry.sigma_uy = Eigen::RowVector2d(cross.sigma_y1, cross.sigma_y2);
  JointEffectSurface surface = constructive_fY(*obs, geometry, f2);
  return {std::move(f2), std::move(geometry), std::move(cross), std::move(surface)};
}

}  // namespace jointfx
