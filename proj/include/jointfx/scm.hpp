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
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "jointfx/polynomial.hpp"

namespace jointfx {

using IndexEdge = std::pair<std::size_t, std::size_t>;

/// Topological order of nodes 0..node_count-1. Ties are broken by smallest
/// node index, so the result does not depend on edge-list order. Throws
/// StructuralError naming one cycle if the edges are not acyclic.
std::vector<std::size_t> topological_order(std::size_t node_count,
                                           std::span<const IndexEdge> edges);

/// Acyclic directed mixed graph over named nodes.
///
/// Node order convention: treatments X_1..X_K first, the outcome Y is the last
/// node. Directed edges are mechanisms; bidirected edges mark dependent noise
/// terms (hidden confounding).
class CausalGraph {
 public:
  using Edge = std::pair<std::string, std::string>;

  CausalGraph() = default;
  CausalGraph(std::vector<std::string> nodes, std::vector<Edge> directed_edges,
              std::vector<Edge> bidirected_edges = {});

  const std::vector<std::string>& nodes() const { return nodes_; }
  const std::vector<Edge>& directed_edges() const { return directed_; }
  const std::vector<Edge>& bidirected_edges() const { return bidirected_; }

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t treatment_count() const { return nodes_.empty() ? 0 : nodes_.size() - 1; }
  std::size_t outcome_index() const { return nodes_.size() - 1; }
  const std::string& outcome() const { return nodes_.back(); }

  bool contains(const std::string& name) const;
  std::size_t index_of(const std::string& name) const;
  /// Parent indices of `node`, sorted by node index.
  std::vector<std::size_t> parents_of(std::size_t node) const;
  std::vector<std::string> parent_names(std::size_t node) const;
  /// Cached topological order (indices).
  const std::vector<std::size_t>& order() const { return order_; }

  friend bool operator==(const CausalGraph& a, const CausalGraph& b) {
    return a.nodes_ == b.nodes_ && a.directed_ == b.directed_ && a.bidirected_ == b.bidirected_;
  }

 private:
  std::vector<std::string> nodes_;
  std::vector<Edge> directed_;
  std::vector<Edge> bidirected_;
  std::vector<std::vector<std::size_t>> parents_;
  std::vector<std::size_t> order_;
};

/// Topologically ordered node names.
std::vector<std::string> topological_order(const CausalGraph& graph);

/// A data-generating condition. Targets are node indices.
struct Regime {
  enum class Kind { observational, single_intervention, joint_intervention };

  Kind kind = Kind::observational;
  std::vector<std::size_t> targets;
  /// One level per target. Empty for datasets whose level varies per row (the
  /// level is then the recorded value of the target column).
  std::vector<double> levels;

  static Regime observational() { return {}; }
  static Regime single(std::size_t target, std::optional<double> level = std::nullopt);
  /// Joint intervention on all treatments 0..K-1 at `levels`.
  static Regime joint(std::vector<double> levels);

  bool is_observational() const { return kind == Kind::observational; }
  bool intervenes_on(std::size_t node) const;

  /// "obs", "do:X2" or "do:X1,X2".
  std::string label(const CausalGraph& graph) const;
  /// Throws StructuralError if the regime is inconsistent with `graph`.
  void validate(const CausalGraph& graph) const;

  friend bool operator==(const Regime&, const Regime&) = default;
};

/// Numeric sample tagged with its regime. Columns follow graph node order.
struct RegimeDataset {
  Regime regime;
  std::vector<std::string> columns;
  Eigen::MatrixXd values;

  std::size_t rows() const { return static_cast<std::size_t>(values.rows()); }
  std::size_t column_index(const std::string& name) const;
  Eigen::VectorXd column(const std::string& name) const {
    return values.col(static_cast<Eigen::Index>(column_index(name)));
  }
};

/// Additive-Gaussian-noise SCM with polynomial structural equations.
///
/// `equations[i]` belongs to node i; roots carry a parentless (intercept-only)
/// equation. Noise coordinates follow node order. Nodes fixed by apply_do keep
/// their row and column in `noise_cov`; their noise draw is discarded.
class Scm {
 public:
  Scm() = default;
  /// Validates parents against the graph and checks noise_cov is symmetric
  /// positive definite (Cholesky, pivots > 1e-10).
  Scm(CausalGraph graph, std::vector<PolynomialEquation> equations, Eigen::MatrixXd noise_cov,
      std::vector<std::optional<double>> fixed = {});

  const CausalGraph& graph() const { return graph_; }
  const std::vector<PolynomialEquation>& equations() const { return equations_; }
  const PolynomialEquation& equation(std::size_t node) const { return equations_.at(node); }
  const Eigen::MatrixXd& noise_cov() const { return noise_cov_; }
  /// Lower Cholesky factor of noise_cov.
  const Eigen::MatrixXd& noise_factor() const { return noise_factor_; }
  const std::vector<std::optional<double>>& fixed() const { return fixed_; }
  bool is_intervened(std::size_t node) const { return fixed_.at(node).has_value(); }
  std::size_t treatment_count() const { return graph_.treatment_count(); }

  friend bool operator==(const Scm& a, const Scm& b) {
    return a.graph_ == b.graph_ && a.equations_ == b.equations_ && a.noise_cov_ == b.noise_cov_ &&
           a.fixed_ == b.fixed_;
  }

 private:
  CausalGraph graph_;
  std::vector<PolynomialEquation> equations_;
  Eigen::MatrixXd noise_cov_;
  Eigen::MatrixXd noise_factor_;
  std::vector<std::optional<double>> fixed_;
};

/// Checks symmetry and positive definiteness; returns the lower Cholesky factor.
Eigen::MatrixXd checked_cholesky(const Eigen::MatrixXd& cov, double pivot_tolerance = 1e-10);

/// Replaces the equations of the intervened nodes by constants and removes
/// their incoming directed and all incident bidirected edges.
Scm apply_do(const Scm& scm, const std::map<std::string, double>& interventions);

/// Draws `n` rows under `regime`; single-intervention regimes need a level.
RegimeDataset sample(const Scm& scm, const Regime& regime, std::size_t n, std::uint64_t seed);

/// do(target) sample where row i is generated with the target fixed to levels[i].
RegimeDataset sample_with_levels(const Scm& scm, std::size_t target, std::span<const double> levels,
                                 std::uint64_t seed);

/// E[Y | do(X = x)] = f_Y evaluated at the parents' entries of x (zero-mean noise).
double joint_effect_oracle(const Scm& scm, std::span<const double> x);

/// Residuals x_j - f_j(parents) for every node of every row (n x node_count).
Eigen::MatrixXd structural_residuals(const Scm& scm, const RegimeDataset& data);

}  // namespace jointfx
