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

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "jointfx/errors.hpp"
#include "jointfx/polynomial.hpp"
#include "jointfx/scm.hpp"

// Constructive two-treatment identification of E[Y | do(X1, X2)] from one
// observational and two single-intervention datasets. Columns are read by
// position: X1, X2, Y.

namespace jointfx {

/// The evaluation grid left the support of one of the regressions.
class InsufficientOverlap : public NumericalError {
 public:
  InsufficientOverlap(const std::string& message, std::vector<double> uncovered)
      : NumericalError(message), uncovered_(std::move(uncovered)) {}
  const std::vector<double>& uncovered() const { return uncovered_; }

 private:
  std::vector<double> uncovered_;
};

struct NoiseGeometry {
  Eigen::Matrix2d sigma_ux = Eigen::Matrix2d::Identity();
  Eigen::RowVector2d sigma_uy = Eigen::RowVector2d::Zero();
  std::vector<double> u2_samples;
  /// Set when sigma_ux is (numerically) singular, e.g. X2 carries no noise.
  bool degenerate = false;
};

/// Least squares of X2 on the basis in X1 over do(X1) rows.
PolynomialEquation estimate_f2(const RegimeDataset& d1);

/// U1 = X1 and U2 = X2 - f2(X1) on observational rows; sigma_ux is their
/// sample covariance. Singular covariance is flagged, not thrown.
NoiseGeometry residual_noise_cov(const RegimeDataset& d_obs, const PolynomialEquation& f2);

struct CrossRegimeOptions {
  std::size_t grid_points = 50;
  double lower_quantile = 0.05;
  double upper_quantile = 0.95;
};

struct CrossRegimeSigma {
  double sigma_y1 = 0.0;
  double sigma_y2 = 0.0;
  /// Contrast curves m(x1) and m2(x2) on their grids, with the fitted slopes.
  std::vector<double> grid1, contrast1, grid2, contrast2;
  double slope1 = 0.0;
  double slope2 = 0.0;
};

/// Recovers Cov(U_Y, U_1) and Cov(U_Y, U_2) by contrasting regressions fitted
/// on the two interventional regimes. Throws InsufficientOverlap when a grid
/// point falls outside the observed range of a regression's inputs.
CrossRegimeSigma cross_regime_sigma(const RegimeDataset& d_obs, const RegimeDataset& d1,
                                    const RegimeDataset& d2, const PolynomialEquation& f2,
                                    const NoiseGeometry& geometry, const CrossRegimeOptions& options = {});

/// sigma_uy * inverse(sigma_ux) * u_x. Throws NumericalError if sigma_ux is singular.
double conditional_noise_mean(const NoiseGeometry& geometry, const Eigen::Vector2d& u_x);

/// Same, with u_x = (x1, x2 - f2(x1)).
double conditional_noise_mean(const NoiseGeometry& geometry, double x1, double x2,
                              const PolynomialEquation& f2);

/// Observational regression of Y minus the conditional noise mean.
class JointEffectSurface {
 public:
  JointEffectSurface(PolynomialEquation observational, NoiseGeometry geometry, PolynomialEquation f2);

  double operator()(double x1, double x2) const;
  const PolynomialEquation& observational() const { return observational_; }
  /// The surface written in the (X1, X2) interaction basis; exact because f2 is affine.
  PolynomialEquation as_equation() const;

 private:
  PolynomialEquation observational_;
  NoiseGeometry geometry_;
  PolynomialEquation f2_;
};

JointEffectSurface constructive_fY(const RegimeDataset& d_obs, const NoiseGeometry& geometry,
                                   const PolynomialEquation& f2);

struct Identify2Result {
  PolynomialEquation f2;
  NoiseGeometry geometry;
  CrossRegimeSigma cross;
  JointEffectSurface surface;
};

/// Runs the whole construction on {obs, do(X1), do(X2)} in any order.
Identify2Result identify2(std::span<const RegimeDataset> datasets, const CrossRegimeOptions& options = {});

}  // namespace jointfx
