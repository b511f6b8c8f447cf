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
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "jointfx/scm.hpp"

namespace jointfx {

/// Random correlation matrix with |off-diagonal| <= c.
///
/// The Gram matrix of `dim` random unit vectors is shrunk toward the identity
/// by the smallest factor that enforces the bound (no shrinkage when the bound
/// already holds). Requires dim >= 2 and 0 <= c < 1.
Eigen::MatrixXd random_correlation_matrix(std::size_t dim, double c, std::uint64_t seed);

struct FeedbackArcResult {
  std::vector<IndexEdge> dag_edges;
  std::vector<IndexEdge> removed_edges;
  /// Vertex sequence; every kept edge points forward in it.
  std::vector<std::size_t> order;
};

/// Eades-Lin-Smyth greedy heuristic for a small feedback arc set.
///
/// Sinks are peeled to the tail of the sequence and sources to its head; when
/// neither exists the vertex with the largest out-degree minus in-degree
/// (ties: smallest index) goes to the head. Edges that point backward in the
/// final sequence are removed. On a connected graph without two-cycles at most
/// |E|/2 - |V|/6 edges are dropped. Self-loops are always removed.
FeedbackArcResult feedback_arc_removal(std::size_t node_count, std::span<const IndexEdge> edges);

/// Coefficients of the three non-root equations of the K = 3 chain, in
/// canonical term order: X2 on (X1), X3 on (X1, X2), Y on (X1, X2, X3).
struct K3Coefficients {
  std::vector<double> x2;
  std::vector<double> x3;
  std::vector<double> y;
};

/// Fixed coefficients used by the experiment harness.
K3Coefficients default_k3_coefficients();

/// Graph X1 -> X2 -> X3 -> Y with every forward edge. When `coefficients` is
/// empty they are drawn uniformly from [-1, 1] using `seed`. X1 is pure noise.
/// Bidirected edges are taken from the nonzero off-diagonals of `sigma`.
Scm build_synthetic_k3(const std::optional<K3Coefficients>& coefficients, const Eigen::MatrixXd& sigma,
                       std::uint64_t seed);

/// Graph X1 -> X2, X1 -> Y, X2 -> Y with `x2` (2 terms) and `y` (4 terms).
Scm build_synthetic_k2(const std::vector<double>& x2, const std::vector<double>& y,
                       const Eigen::MatrixXd& sigma);

/// Ten-node SCM shaped like a small gene-regulatory network: a random directed
/// graph with 15 edges, made acyclic with feedback_arc_removal, relabelled in
/// topological order as X1..X9, Y (Y last, with at least two parents).
/// Coefficients are uniform in [-1, 1]; noise correlations are bounded by `c`.
/// Equations are rescaled node by node so that every variable has (approximately)
/// zero mean and unit variance under the observational regime. For a fixed seed
/// only the noise correlation magnitude depends on `c`.
Scm build_semisynthetic_10(std::uint64_t seed, double c);

/// One observational dataset of size n plus, for each treatment k, a do(X_k)
/// dataset of size n whose levels are drawn from the empirical marginal of
/// X_k in a fresh observational sample of size n.
std::vector<RegimeDataset> generate_regime_suite(const Scm& scm, std::size_t n, std::uint64_t seed);

/// Per-column affine map z = (x - mean) / scale estimated on observational data.
struct StandardizeTransform {
  Eigen::RowVectorXd mean;
  Eigen::RowVectorXd scale;

  RegimeDataset apply(const RegimeDataset& data) const;
  RegimeDataset invert(const RegimeDataset& data) const;
};

/// Standardizes every dataset with moments of the observational one (sample
/// standard deviation). Throws NumericalError on a zero-variance column.
std::pair<std::vector<RegimeDataset>, StandardizeTransform> standardize(
    std::span<const RegimeDataset> datasets);

}  // namespace jointfx
