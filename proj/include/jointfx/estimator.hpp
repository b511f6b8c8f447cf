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

#include "jointfx/polynomial.hpp"
#include "jointfx/scm.hpp"

namespace jointfx {

/// Per-regime noise covariances of the combined likelihood.
///
/// `sigma0` covers every node (observational regime). `sigma_k[k]` belongs to
/// the do(node k) regime and covers every node except k, in node order.
struct NoiseCovarianceSet {
  Eigen::MatrixXd sigma0;
  std::vector<Eigen::MatrixXd> sigma_k;
  /// Set when sigma_closed_form had to add jitter to a near-singular estimate.
  bool jittered = false;

  static NoiseCovarianceSet identity(std::size_t node_count);
  const Eigen::MatrixXd& for_regime(const Regime& regime) const;
  /// Largest |Sigma^k - (Sigma^0 without row/col k)| over k; a model-fit diagnostic.
  double max_submatrix_gap() const;
};

/// Nodes that contribute a residual in `regime` (all but the intervened one).
std::vector<std::size_t> residual_nodes(std::size_t node_count, const Regime& regime);

struct FitConfig {
  enum class ThetaStep { newton, gradient };

  /// Search direction of the theta-step. Both use Armijo backtracking.
  ThetaStep theta_step = ThetaStep::newton;
  /// Inner theta iterations stop once the gain drops below this times n_total.
  double tol_inner_per_row = 1e-12;
  /// Alternation stops once the round gain drops below this times n_total.
  double tol_outer_per_row = 1e-8;
  std::size_t max_rounds = 200;
  std::size_t max_inner_steps = 200;
  double armijo = 1e-4;
  std::size_t max_halvings = 60;
  /// Added to the diagonal of a covariance estimate whose smallest eigenvalue
  /// falls below `eigen_floor`.
  double jitter = 1e-8;
  double eigen_floor = 1e-10;
  /// Ridge penalty on non-intercept coefficients; 0 disables it.
  double ridge = 0.0;
};

struct FittedAnm {
  enum class Status { converged, max_rounds_reached };

  CausalGraph graph;
  std::vector<PolynomialEquation> equations;
  NoiseCovarianceSet noise_covs;
  /// Combined log-likelihood after initialization and after each round.
  std::vector<double> fit_trace;
  FitConfig config_used;
  Status status = Status::converged;
  std::size_t rounds = 0;
};

/// Concatenated coefficients of all equations, node order.
Eigen::VectorXd flatten(std::span<const PolynomialEquation> equations);
std::vector<PolynomialEquation> unflatten(std::span<const PolynomialEquation> layout,
                                          const Eigen::VectorXd& theta);

/// Combined log-likelihood: sum over regimes and rows of the Gaussian
/// log-density of the residual vector (every node for the observational
/// regime, all but the intervened node for do(X_k)). `theta[j]` is node j's
/// equation; dataset columns must be named after the nodes.
double combined_log_likelihood(std::span<const PolynomialEquation> theta,
                               const NoiseCovarianceSet& covs,
                               std::span<const RegimeDataset> data);

/// Closed-form covariance step: per regime, the uncentered second moment of
/// the residuals (noise has zero mean by assumption).
NoiseCovarianceSet sigma_closed_form(std::span<const PolynomialEquation> theta,
                                     std::span<const RegimeDataset> data,
                                     const FitConfig& config = {});

/// Analytic gradient of combined_log_likelihood with respect to flatten(theta).
Eigen::VectorXd grad_theta(std::span<const PolynomialEquation> theta,
                           const NoiseCovarianceSet& covs, std::span<const RegimeDataset> data);

/// Joint maximum-likelihood fit of all structural equations over pooled
/// observational and single-intervention data, alternating a theta-step and
/// the closed-form covariance step.
FittedAnm fit(std::span<const RegimeDataset> data, const CausalGraph& graph,
              const FitConfig& config = {});

/// Fitted f_Y at the joint intervention level `x` (one entry per treatment).
double predict_joint_effect(const FittedAnm& model, std::span<const double> x);

/// Pooled-regression baseline: least squares of the outcome (last column) on
/// the polynomial basis of `outcome_parents`, over the rows of every regime.
PolynomialEquation fit_reg_baseline(std::span<const RegimeDataset> data,
                                    std::span<const std::string> outcome_parents,
                                    const FitConfig& config = {});

/// Mean absolute coefficient difference over the given equations.
double parameter_mae(std::span<const PolynomialEquation> estimate,
                     std::span<const PolynomialEquation> truth);

}  // namespace jointfx
