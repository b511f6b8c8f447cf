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

namespace jointfx {

/// Structural equation `child = f(parents)` where f is a polynomial with all
/// main effects and all pairwise interactions of distinct parents.
///
/// Canonical term order (stable across runs, so coefficient vectors from
/// different fits are directly comparable):
///   [1, p_0, p_1, ..., p_{m-1}, p_0*p_1, p_0*p_2, ..., p_0*p_{m-1}, p_1*p_2, ...]
/// i.e. intercept, main effects in parent order, then interactions (i, j) with
/// i < j in lexicographic order.
class PolynomialEquation {
 public:
  PolynomialEquation() = default;
  PolynomialEquation(std::string child, std::vector<std::string> parents,
                     std::vector<double> coefficients);

  /// Equation with all coefficients zero.
  static PolynomialEquation zero(std::string child, std::vector<std::string> parents);
  /// Parentless equation `child = value`.
  static PolynomialEquation constant(std::string child, double value);

  static std::size_t term_count(std::size_t parent_count) {
    return parent_count == 0 ? 1 : 1 + parent_count + parent_count * (parent_count - 1) / 2;
  }

  const std::string& child() const { return child_; }
  const std::vector<std::string>& parents() const { return parents_; }
  const std::vector<double>& coefficients() const { return coefficients_; }
  std::size_t size() const { return coefficients_.size(); }

  double evaluate(std::span<const double> parent_values) const;

  /// Human-readable term labels in canonical order ("1", "X1", "X1*X2").
  std::vector<std::string> term_names() const;

  PolynomialEquation with_coefficients(std::vector<double> coefficients) const;

  friend bool operator==(const PolynomialEquation&, const PolynomialEquation&) = default;

 private:
  std::string child_;
  std::vector<std::string> parents_;
  std::vector<double> coefficients_;
};

/// Scalar form of eval_equation; throws StructuralError on arity mismatch.
double eval_equation(const PolynomialEquation& eq, std::span<const double> parent_values);

/// Writes the canonical feature row for `parent_values` into `out`
/// (`out.size()` must equal term_count(parent_values.size())).
void polynomial_features(std::span<const double> parent_values, std::span<double> out);

/// Feature matrix (rows x term_count(cols)) for a matrix of parent columns.
Eigen::MatrixXd feature_matrix(const Eigen::MatrixXd& parent_columns);

/// Least-squares coefficients for `design * beta ~ target`, optionally with a
/// ridge penalty on the non-intercept terms. Throws NumericalError when the
/// design is rank deficient (and no ridge is given) or has fewer rows than
/// columns.
Eigen::VectorXd least_squares(const Eigen::MatrixXd& design, const Eigen::VectorXd& target,
                              double ridge = 0.0);

}  // namespace jointfx
