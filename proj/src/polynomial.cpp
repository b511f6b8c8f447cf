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

#include "jointfx/polynomial.hpp"

#include <utility>

#include "jointfx/errors.hpp"

namespace jointfx {

PolynomialEquation::PolynomialEquation(std::string child, std::vector<std::string> parents,
                                       std::vector<double> coefficients)
    : child_(std::move(child)), parents_(std::move(parents)), coefficients_(std::move(coefficients)) {
  if (coefficients_.size() != term_count(parents_.size())) {
    throw StructuralError("equation for " + child_ + ": expected " +
                          std::to_string(term_count(parents_.size())) + " coefficients, got " +
                          std::to_string(coefficients_.size()));
  }
}

PolynomialEquation PolynomialEquation::zero(std::string child, std::vector<std::string> parents) {
  const std::size_t terms = term_count(parents.size());
  return PolynomialEquation(std::move(child), std::move(parents), std::vector<double>(terms, 0.0));
}

PolynomialEquation PolynomialEquation::constant(std::string child, double value) {
  return PolynomialEquation(std::move(child), {}, {value});
}

double PolynomialEquation::evaluate(std::span<const double> x) const {
  if (x.size() != parents_.size()) {
    throw StructuralError("equation for " + child_ + " takes " + std::to_string(parents_.size()) +
                          " parent values, got " + std::to_string(x.size()));
  }
  const std::size_t m = x.size();
  double value = coefficients_[0];
  for (std::size_t i = 0; i < m; ++i) value += coefficients_[1 + i] * x[i];
  std::size_t term = 1 + m;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) value += coefficients_[term++] * x[i] * x[j];
  }
  return value;
}

std::vector<std::string> PolynomialEquation::term_names() const {
  std::vector<std::string> names{"1"};
  for (const auto& p : parents_) names.push_back(p);
  for (std::size_t i = 0; i < parents_.size(); ++i) {
    for (std::size_t j = i + 1; j < parents_.size(); ++j) names.push_back(parents_[i] + "*" + parents_[j]);
  }
  return names;
}

PolynomialEquation PolynomialEquation::with_coefficients(std::vector<double> coefficients) const {
  return PolynomialEquation(child_, parents_, std::move(coefficients));
}

double eval_equation(const PolynomialEquation& eq, std::span<const double> parent_values) {
  return eq.evaluate(parent_values);
}

void polynomial_features(std::span<const double> x, std::span<double> out) {
  const std::size_t m = x.size();
  if (out.size() != PolynomialEquation::term_count(m)) {
    throw StructuralError("feature buffer has wrong size");
  }
  out[0] = 1.0;
  for (std::size_t i = 0; i < m; ++i) out[1 + i] = x[i];
  std::size_t term = 1 + m;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) out[term++] = x[i] * x[j];
  }
}

Eigen::MatrixXd feature_matrix(const Eigen::MatrixXd& parents) {
  const Eigen::Index n = parents.rows();
  const Eigen::Index m = parents.cols();
  Eigen::MatrixXd features(n, static_cast<Eigen::Index>(PolynomialEquation::term_count(m)));
  features.col(0).setOnes();
  if (m > 0) features.middleCols(1, m) = parents;
  Eigen::Index term = 1 + m;
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = i + 1; j < m; ++j) {
      features.col(term++) = parents.col(i).cwiseProduct(parents.col(j));
    }
  }
  return features;
}

Eigen::VectorXd least_squares(const Eigen::MatrixXd& design, const Eigen::VectorXd& target,
                              double ridge) {
  if (design.rows() != target.size()) throw StructuralError("least_squares: row count mismatch");
  if (design.rows() < design.cols()) {
    throw NumericalError("least_squares: " + std::to_string(design.rows()) + " rows for " +
                         std::to_string(design.cols()) + " basis terms");
  }
  if (ridge > 0.0) {
    Eigen::MatrixXd gram = design.transpose() * design;
    for (Eigen::Index i = 1; i < gram.rows(); ++i) gram(i, i) += ridge;
    return gram.ldlt().solve(design.transpose() * target);
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  qr.setThreshold(1e-10);
  if (qr.rank() < design.cols()) {
    throw NumericalError("least_squares: design matrix is rank deficient (rank " +
                         std::to_string(qr.rank()) + " of " + std::to_string(design.cols()) + ")");
  }
  return qr.solve(target);
}

}  // namespace jointfx
