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

#include "jointfx/estimator.hpp"

#include <algorithm>
#include <cmath>

#include "jointfx/errors.hpp"

namespace jointfx {

NoiseCovarianceSet NoiseCovarianceSet::identity(std::size_t node_count) {
  NoiseCovarianceSet set;
  const auto d = static_cast<Eigen::Index>(node_count);
  set.sigma0 = Eigen::MatrixXd::Identity(d, d);
  set.sigma_k.assign(node_count > 0 ? node_count - 1 : 0, Eigen::MatrixXd::Identity(d - 1, d - 1));
  return set;
}

const Eigen::MatrixXd& NoiseCovarianceSet::for_regime(const Regime& regime) const {
  if (regime.is_observational()) return sigma0;
  if (regime.kind != Regime::Kind::single_intervention) {
    throw StructuralError("the combined likelihood has no joint-intervention regime");
  }
  return sigma_k.at(regime.targets.at(0));
}

double NoiseCovarianceSet::max_submatrix_gap() const {
  double gap = 0.0;
  for (std::size_t k = 0; k < sigma_k.size(); ++k) {
    const auto keep = residual_nodes(static_cast<std::size_t>(sigma0.rows()), Regime::single(k));
    for (std::size_t a = 0; a < keep.size(); ++a) {
      for (std::size_t b = 0; b < keep.size(); ++b) {
        gap = std::max(gap, std::abs(sigma_k[k](static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) -
                                     sigma0(static_cast<Eigen::Index>(keep[a]), static_cast<Eigen::Index>(keep[b]))));
      }
    }
  }
  return gap;
}

std::vector<std::size_t> residual_nodes(std::size_t node_count, const Regime& regime) {
  std::vector<std::size_t> nodes;
  for (std::size_t v = 0; v < node_count; ++v) {
    if (!regime.intervenes_on(v)) nodes.push_back(v);
  }
  return nodes;
}

Eigen::VectorXd flatten(std::span<const PolynomialEquation> equations) {
  std::size_t total = 0;
  for (const auto& eq : equations) total += eq.size();
  Eigen::VectorXd theta(static_cast<Eigen::Index>(total));
  Eigen::Index pos = 0;
  for (const auto& eq : equations) {
    for (double c : eq.coefficients()) theta[pos++] = c;
  }
  return theta;
}

std::vector<PolynomialEquation> unflatten(std::span<const PolynomialEquation> layout,
                                          const Eigen::VectorXd& theta) {
  std::vector<PolynomialEquation> out;
  Eigen::Index pos = 0;
  for (const auto& eq : layout) {
    if (pos + static_cast<Eigen::Index>(eq.size()) > theta.size()) {
      throw StructuralError("parameter vector is too short");
    }
    std::vector<double> coefficients(theta.data() + pos, theta.data() + pos + eq.size());
    pos += static_cast<Eigen::Index>(eq.size());
    out.push_back(eq.with_coefficients(std::move(coefficients)));
  }
  if (pos != theta.size()) throw StructuralError("parameter vector is too long");
  return out;
}

namespace {

constexpr double kLogTwoPi = 1.8378770664093454836;

/// Sufficient structure of the combined likelihood for fixed data: per-regime
/// residual targets and feature matrices, and the parameter layout.
class LikelihoodProblem {
 public:
  LikelihoodProblem(std::span<const PolynomialEquation> layout, std::span<const RegimeDataset> data)
      : layout_(layout.begin(), layout.end()) {
    const std::size_t d = layout_.size();
    if (d == 0) throw StructuralError("no equations");
    if (data.empty()) throw StructuralError("no datasets");
    std::vector<std::string> names;
    for (const auto& eq : layout_) names.push_back(eq.child());

    std::size_t offset = 0;
    for (const auto& eq : layout_) {
      offsets_.push_back(offset);
      offset += eq.size();
      std::vector<std::size_t> idx;
      for (const auto& p : eq.parents()) {
        const auto it = std::find(names.begin(), names.end(), p);
        if (it == names.end()) throw StructuralError("unknown parent " + p);
        idx.push_back(static_cast<std::size_t>(it - names.begin()));
      }
      parents_.push_back(std::move(idx));
    }
    parameter_count_ = offset;

    for (const auto& ds : data) {
      if (ds.columns != names) {
        throw StructuralError("dataset columns do not match the model's node order");
      }
      if (!ds.regime.is_observational() && ds.regime.kind != Regime::Kind::single_intervention) {
        throw StructuralError("combined likelihood accepts observational and single-intervention data");
      }
      if (!ds.regime.is_observational() && ds.regime.targets.at(0) + 1 >= d) {
        throw StructuralError("intervention target must be a treatment");
      }
      Block block;
      block.regime = ds.regime;
      block.nodes = residual_nodes(d, ds.regime);
      const auto n = static_cast<Eigen::Index>(ds.rows());
      block.targets.resize(n, static_cast<Eigen::Index>(block.nodes.size()));
      std::size_t cols = 0;
      for (std::size_t v : block.nodes) cols += layout_[v].size();
      block.features.resize(n, static_cast<Eigen::Index>(cols));
      Eigen::Index col = 0;
      for (std::size_t a = 0; a < block.nodes.size(); ++a) {
        const std::size_t v = block.nodes[a];
        block.targets.col(static_cast<Eigen::Index>(a)) = ds.values.col(static_cast<Eigen::Index>(v));
        Eigen::MatrixXd parents(n, static_cast<Eigen::Index>(parents_[v].size()));
        for (std::size_t i = 0; i < parents_[v].size(); ++i) {
          parents.col(static_cast<Eigen::Index>(i)) = ds.values.col(static_cast<Eigen::Index>(parents_[v][i]));
        }
        block.feature_offsets.push_back(col);
        const auto width = static_cast<Eigen::Index>(layout_[v].size());
        block.features.middleCols(col, width) = feature_matrix(parents);
        col += width;
      }
      block.gram = block.features.transpose() * block.features;
      total_rows_ += ds.rows();
      blocks_.push_back(std::move(block));
    }
  }

  std::size_t parameter_count() const { return parameter_count_; }
  std::size_t total_rows() const { return total_rows_; }
  const std::vector<PolynomialEquation>& layout() const { return layout_; }

  Eigen::MatrixXd residuals(std::size_t b, const Eigen::VectorXd& theta) const {
    const Block& block = blocks_[b];
    Eigen::MatrixXd r = block.targets;
    for (std::size_t a = 0; a < block.nodes.size(); ++a) {
      const std::size_t v = block.nodes[a];
      const auto width = static_cast<Eigen::Index>(layout_[v].size());
      r.col(static_cast<Eigen::Index>(a)).noalias() -=
          block.features.middleCols(block.feature_offsets[a], width) *
          theta.segment(static_cast<Eigen::Index>(offsets_[v]), width);
    }
    return r;
  }

  double log_likelihood(const Eigen::VectorXd& theta, const NoiseCovarianceSet& covs,
                        double ridge) const {
    double total = 0.0;
    for (std::size_t b = 0; b < blocks_.size(); ++b) {
      const Eigen::MatrixXd& sigma = covs.for_regime(blocks_[b].regime);
      check_dims(sigma, b);
      Eigen::LLT<Eigen::MatrixXd> llt(sigma);
      if (llt.info() != Eigen::Success) throw NumericalError("noise covariance is not positive definite");
      const Eigen::MatrixXd r = residuals(b, theta);
      const double n = static_cast<double>(r.rows());
      const double dim = static_cast<double>(r.cols());
      const double logdet = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
      // Sum of squared Mahalanobis norms = ||L^{-1} R^T||_F^2.
      const Eigen::MatrixXd whitened = llt.matrixL().solve(r.transpose());
      total += -0.5 * n * (dim * kLogTwoPi + logdet) - 0.5 * whitened.squaredNorm();
    }
    if (ridge > 0.0) total -= 0.5 * ridge * penalized_norm(theta);
    return total;
  }

  Eigen::VectorXd gradient(const Eigen::VectorXd& theta, const NoiseCovarianceSet& covs,
                           double ridge) const {
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(parameter_count_));
    for (std::size_t b = 0; b < blocks_.size(); ++b) {
      const Block& block = blocks_[b];
      const Eigen::MatrixXd& sigma = covs.for_regime(block.regime);
      check_dims(sigma, b);
      Eigen::LLT<Eigen::MatrixXd> llt(sigma);
      if (llt.info() != Eigen::Success) throw NumericalError("noise covariance is not positive definite");
      // Rows of (Sigma^{-1} r)^T.
      const Eigen::MatrixXd precision_r = llt.solve(residuals(b, theta).transpose()).transpose();
      for (std::size_t a = 0; a < block.nodes.size(); ++a) {
        const std::size_t v = block.nodes[a];
        const auto width = static_cast<Eigen::Index>(layout_[v].size());
        grad.segment(static_cast<Eigen::Index>(offsets_[v]), width).noalias() +=
            block.features.middleCols(block.feature_offsets[a], width).transpose() *
            precision_r.col(static_cast<Eigen::Index>(a));
      }
    }
    if (ridge > 0.0) grad -= ridge * penalty_mask().cwiseProduct(theta);
    return grad;
  }

  /// Negative Hessian of the log-likelihood in theta (constant for fixed covs).
  Eigen::MatrixXd information(const NoiseCovarianceSet& covs, double ridge) const {
    const auto p = static_cast<Eigen::Index>(parameter_count_);
    Eigen::MatrixXd info = Eigen::MatrixXd::Zero(p, p);
    for (std::size_t b = 0; b < blocks_.size(); ++b) {
      const Block& block = blocks_[b];
      const Eigen::MatrixXd precision = covs.for_regime(block.regime).inverse();
      const Eigen::MatrixXd& gram = block.gram;
      for (std::size_t a = 0; a < block.nodes.size(); ++a) {
        for (std::size_t c = 0; c < block.nodes.size(); ++c) {
          const std::size_t va = block.nodes[a];
          const std::size_t vc = block.nodes[c];
          const auto wa = static_cast<Eigen::Index>(layout_[va].size());
          const auto wc = static_cast<Eigen::Index>(layout_[vc].size());
          info.block(static_cast<Eigen::Index>(offsets_[va]), static_cast<Eigen::Index>(offsets_[vc]), wa, wc) +=
              precision(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(c)) *
              gram.block(block.feature_offsets[a], block.feature_offsets[c], wa, wc);
        }
      }
    }
    if (ridge > 0.0) info.diagonal() += ridge * penalty_mask();
    return info;
  }

  NoiseCovarianceSet sigma_step(const Eigen::VectorXd& theta, const FitConfig& config) const {
    const std::size_t d = layout_.size();
    NoiseCovarianceSet covs = NoiseCovarianceSet::identity(d);
    std::vector<bool> seen(d, false);
    for (std::size_t b = 0; b < blocks_.size(); ++b) {
      const Block& block = blocks_[b];
      const std::size_t slot = block.regime.is_observational() ? 0 : block.regime.targets[0] + 1;
      if (seen[slot]) throw StructuralError("more than one dataset for regime " + std::to_string(slot));
      seen[slot] = true;
      const Eigen::MatrixXd r = residuals(b, theta);
      if (r.rows() < r.cols()) {
        throw NumericalError("regime has " + std::to_string(r.rows()) + " rows for a " +
                             std::to_string(r.cols()) + "-dimensional covariance; more data is needed");
      }
      Eigen::MatrixXd sigma = (r.transpose() * r) / static_cast<double>(r.rows());
      sigma = 0.5 * (sigma + sigma.transpose());
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sigma, Eigen::EigenvaluesOnly);
      if (eig.eigenvalues().minCoeff() < config.eigen_floor) {
        sigma.diagonal().array() += config.jitter;
        covs.jittered = true;
      }
      if (slot == 0) {
        covs.sigma0 = std::move(sigma);
      } else {
        covs.sigma_k[slot - 1] = std::move(sigma);
      }
    }
    return covs;
  }

 private:
  struct Block {
    Regime regime;
    std::vector<std::size_t> nodes;
    Eigen::MatrixXd targets;
    Eigen::MatrixXd features;
    Eigen::MatrixXd gram;
    std::vector<Eigen::Index> feature_offsets;
  };

  void check_dims(const Eigen::MatrixXd& sigma, std::size_t b) const {
    if (sigma.rows() != static_cast<Eigen::Index>(blocks_[b].nodes.size()) || sigma.cols() != sigma.rows()) {
      throw StructuralError("noise covariance has the wrong dimension for its regime");
    }
  }

  Eigen::VectorXd penalty_mask() const {
    Eigen::VectorXd mask = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(parameter_count_));
    for (std::size_t off : offsets_) mask[static_cast<Eigen::Index>(off)] = 0.0;
    return mask;
  }

  double penalized_norm(const Eigen::VectorXd& theta) const {
    return penalty_mask().cwiseProduct(theta).squaredNorm();
  }

  std::vector<PolynomialEquation> layout_;
  std::vector<std::size_t> offsets_;
  std::vector<std::vector<std::size_t>> parents_;
  std::size_t parameter_count_ = 0;
  std::size_t total_rows_ = 0;
  std::vector<Block> blocks_;
};

// Armijo-backtracked ascent along `direction`. Returns the accepted gain.
double line_search(const LikelihoodProblem& problem, const NoiseCovarianceSet& covs,
                   const FitConfig& config, Eigen::VectorXd& theta, double& value,
                   const Eigen::VectorXd& grad, const Eigen::VectorXd& direction, double& step) {
  const double slope = grad.dot(direction);
  if (!(slope > 0.0)) return 0.0;
  for (std::size_t h = 0; h <= config.max_halvings; ++h) {
    const Eigen::VectorXd candidate = theta + step * direction;
    const double candidate_value = problem.log_likelihood(candidate, covs, config.ridge);
    if (std::isfinite(candidate_value) && candidate_value >= value + config.armijo * step * slope) {
      const double gain = candidate_value - value;
      theta = candidate;
      value = candidate_value;
      return gain;
    }
    step *= 0.5;
  }
  return 0.0;
}

double theta_step(const LikelihoodProblem& problem, const NoiseCovarianceSet& covs,
                  const FitConfig& config, Eigen::VectorXd& theta) {
  double value = problem.log_likelihood(theta, covs, config.ridge);
  const double start = value;
  const double tol = config.tol_inner_per_row * static_cast<double>(problem.total_rows());

  Eigen::LDLT<Eigen::MatrixXd> newton;
  if (config.theta_step == FitConfig::ThetaStep::newton) {
    newton.compute(problem.information(covs, config.ridge));
    if (newton.info() != Eigen::Success || newton.vectorD().minCoeff() <= 0.0) {
      throw NumericalError("theta-step information matrix is singular; parameters are not identified by the data");
    }
  }
  double gradient_step = 1.0;
  for (std::size_t it = 0; it < config.max_inner_steps; ++it) {
    const Eigen::VectorXd grad = problem.gradient(theta, covs, config.ridge);
    double gain = 0.0;
    if (config.theta_step == FitConfig::ThetaStep::newton) {
      double step = 1.0;
      gain = line_search(problem, covs, config, theta, value, grad, newton.solve(grad), step);
    } else {
      double step = gradient_step;
      gain = line_search(problem, covs, config, theta, value, grad, grad, step);
      gradient_step = 2.0 * step;
    }
    if (gain < tol) break;
  }
  return value - start;
}

}  // namespace

double combined_log_likelihood(std::span<const PolynomialEquation> theta,
                               const NoiseCovarianceSet& covs, std::span<const RegimeDataset> data) {
  const LikelihoodProblem problem(theta, data);
  return problem.log_likelihood(flatten(theta), covs, 0.0);
}

NoiseCovarianceSet sigma_closed_form(std::span<const PolynomialEquation> theta,
                                     std::span<const RegimeDataset> data, const FitConfig& config) {
  const LikelihoodProblem problem(theta, data);
  return problem.sigma_step(flatten(theta), config);
}

Eigen::VectorXd grad_theta(std::span<const PolynomialEquation> theta, const NoiseCovarianceSet& covs,
                           std::span<const RegimeDataset> data) {
  const LikelihoodProblem problem(theta, data);
  return problem.gradient(flatten(theta), covs, 0.0);
}

namespace {

std::vector<PolynomialEquation> initial_equations(std::span<const RegimeDataset> data,
                                                  const CausalGraph& graph, const FitConfig& config) {
  // Per-equation least squares over every regime in which the node is not intervened.
  std::vector<PolynomialEquation> equations;
  for (std::size_t v = 0; v < graph.node_count(); ++v) {
    const auto parents = graph.parents_of(v);
    std::size_t rows = 0;
    for (const auto& ds : data) {
      if (!ds.regime.intervenes_on(v)) rows += ds.rows();
    }
    Eigen::MatrixXd parent_cols(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(parents.size()));
    Eigen::VectorXd target(static_cast<Eigen::Index>(rows));
    Eigen::Index at = 0;
    for (const auto& ds : data) {
      if (ds.regime.intervenes_on(v)) continue;
      const auto n = static_cast<Eigen::Index>(ds.rows());
      for (std::size_t i = 0; i < parents.size(); ++i) {
        parent_cols.col(static_cast<Eigen::Index>(i)).segment(at, n) = ds.values.col(static_cast<Eigen::Index>(parents[i]));
      }
      target.segment(at, n) = ds.values.col(static_cast<Eigen::Index>(v));
      at += n;
    }
    const Eigen::VectorXd beta = least_squares(feature_matrix(parent_cols), target, config.ridge);
    equations.emplace_back(graph.nodes()[v], graph.parent_names(v),
                           std::vector<double>(beta.data(), beta.data() + beta.size()));
  }
  return equations;
}

}  // namespace

FittedAnm fit(std::span<const RegimeDataset> data, const CausalGraph& graph, const FitConfig& config) {
  const std::size_t d = graph.node_count();
  std::vector<bool> present(d, false);
  for (const auto& ds : data) {
    ds.regime.validate(graph);
    if (ds.columns != graph.nodes()) throw StructuralError("dataset columns do not match the graph");
    const std::size_t slot = ds.regime.is_observational() ? 0 : ds.regime.targets.at(0) + 1;
    if (ds.regime.kind == Regime::Kind::joint_intervention) {
      throw StructuralError("fit takes observational and single-intervention data only");
    }
    if (present[slot]) throw StructuralError("duplicate dataset for regime " + ds.regime.label(graph));
    present[slot] = true;
  }
  for (std::size_t slot = 0; slot < d; ++slot) {
    if (!present[slot]) {
      throw StructuralError(slot == 0 ? "missing observational dataset"
                                      : "missing do(" + graph.nodes()[slot - 1] + ") dataset");
    }
  }

  FittedAnm model;
  model.graph = graph;
  model.config_used = config;
  const auto initial = initial_equations(data, graph, config);
  const LikelihoodProblem problem(initial, data);
  Eigen::VectorXd theta = flatten(initial);
  NoiseCovarianceSet covs = NoiseCovarianceSet::identity(d);

  const double tol_outer = config.tol_outer_per_row * static_cast<double>(problem.total_rows());
  double value = problem.log_likelihood(theta, covs, config.ridge);
  model.fit_trace.push_back(value);
  model.status = FittedAnm::Status::max_rounds_reached;
  for (std::size_t round = 0; round < config.max_rounds; ++round) {
    theta_step(problem, covs, config, theta);
    covs = problem.sigma_step(theta, config);
    const double next = problem.log_likelihood(theta, covs, config.ridge);
    model.fit_trace.push_back(next);
    model.rounds = round + 1;
    const double gain = next - value;
    value = next;
    if (gain < tol_outer) {
      model.status = FittedAnm::Status::converged;
      break;
    }
  }
  // Leave theta stationary for the reported covariances.
  theta_step(problem, covs, config, theta);
  model.fit_trace.push_back(problem.log_likelihood(theta, covs, config.ridge));

  model.equations = unflatten(initial, theta);
  model.noise_covs = std::move(covs);
  return model;
}

double predict_joint_effect(const FittedAnm& model, std::span<const double> x) {
  const CausalGraph& g = model.graph;
  if (x.size() != g.treatment_count()) {
    throw StructuralError("joint effect needs " + std::to_string(g.treatment_count()) +
                          " treatment levels, got " + std::to_string(x.size()));
  }
  const auto& eq = model.equations.at(g.outcome_index());
  std::vector<double> values;
  for (const auto& p : eq.parents()) values.push_back(x[g.index_of(p)]);
  return eq.evaluate(values);
}

PolynomialEquation fit_reg_baseline(std::span<const RegimeDataset> data,
                                    std::span<const std::string> outcome_parents,
                                    const FitConfig& config) {
  if (data.empty()) throw StructuralError("no datasets");
  const auto& columns = data.front().columns;
  const std::string& outcome = columns.back();
  std::size_t rows = 0;
  for (const auto& ds : data) {
    if (ds.columns != columns) throw StructuralError("datasets have different column sets");
    rows += ds.rows();
  }
  Eigen::MatrixXd parent_cols(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(outcome_parents.size()));
  Eigen::VectorXd target(static_cast<Eigen::Index>(rows));
  Eigen::Index at = 0;
  for (const auto& ds : data) {
    const auto n = static_cast<Eigen::Index>(ds.rows());
    for (std::size_t i = 0; i < outcome_parents.size(); ++i) {
      parent_cols.col(static_cast<Eigen::Index>(i)).segment(at, n) = ds.column(outcome_parents[i]);
    }
    target.segment(at, n) = ds.values.col(ds.values.cols() - 1);
    at += n;
  }
  const Eigen::VectorXd beta = least_squares(feature_matrix(parent_cols), target, config.ridge);
  return PolynomialEquation(outcome, {outcome_parents.begin(), outcome_parents.end()},
                            std::vector<double>(beta.data(), beta.data() + beta.size()));
}

double parameter_mae(std::span<const PolynomialEquation> estimate,
                     std::span<const PolynomialEquation> truth) {
  if (estimate.size() != truth.size()) throw StructuralError("equation count mismatch");
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < estimate.size(); ++i) {
    if (estimate[i].size() != truth[i].size()) throw StructuralError("coefficient count mismatch");
    for (std::size_t j = 0; j < estimate[i].size(); ++j) {
      sum += std::abs(estimate[i].coefficients()[j] - truth[i].coefficients()[j]);
      ++count;
    }
  }
  return count == 0 ? 0.0 : sum / static_cast<double>(count);
}

}  // namespace jointfx
