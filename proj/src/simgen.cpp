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

#include "jointfx/simgen.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "jointfx/errors.hpp"
#include "jointfx/rng.hpp"

namespace jointfx {

Eigen::MatrixXd random_correlation_matrix(std::size_t dim, double c, std::uint64_t seed) {
  if (dim < 2) throw std::invalid_argument("correlation matrix dimension must be at least 2");
  if (!(c >= 0.0 && c < 1.0)) throw std::invalid_argument("correlation bound must satisfy 0 <= c < 1");
  const auto d = static_cast<Eigen::Index>(dim);
  Rng rng(seed);
  Eigen::MatrixXd vectors(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) vectors(i, j) = rng.normal();
    vectors.row(i).normalize();
  }
  Eigen::MatrixXd gram = vectors * vectors.transpose();
  gram.diagonal().setOnes();

  double largest = 0.0;
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = i + 1; j < d; ++j) largest = std::max(largest, std::abs(gram(i, j)));
  }
  const double shrink = largest > c ? c / largest : 1.0;
  Eigen::MatrixXd corr = shrink * gram;
  corr.diagonal().setOnes();
  corr = 0.5 * (corr + corr.transpose());
  checked_cholesky(corr);
  return corr;
}

FeedbackArcResult feedback_arc_removal(std::size_t node_count, std::span<const IndexEdge> edges) {
  std::vector<std::multiset<std::size_t>> out(node_count), in(node_count);
  for (const auto& [a, b] : edges) {
    if (a >= node_count || b >= node_count) throw StructuralError("edge endpoint out of range");
    if (a == b) continue;
    out[a].insert(b);
    in[b].insert(a);
  }
  std::vector<bool> alive(node_count, true);
  std::size_t remaining = node_count;
  std::vector<std::size_t> head, tail;

  auto remove = [&](std::size_t v) {
    alive[v] = false;
    --remaining;
    for (std::size_t w : out[v]) in[w].erase(in[w].find(v));
    for (std::size_t w : in[v]) out[w].erase(out[w].find(v));
    out[v].clear();
    in[v].clear();
  };
  auto first_where = [&](auto&& predicate) -> std::optional<std::size_t> {
    for (std::size_t v = 0; v < node_count; ++v) {
      if (alive[v] && predicate(v)) return v;
    }
    return std::nullopt;
  };

  while (remaining > 0) {
    while (auto sink = first_where([&](std::size_t v) { return out[v].empty(); })) {
      tail.push_back(*sink);
      remove(*sink);
    }
    while (auto source = first_where([&](std::size_t v) { return in[v].empty(); })) {
      head.push_back(*source);
      remove(*source);
    }
    if (remaining == 0) break;
    std::size_t best = node_count;
    long best_delta = 0;
    for (std::size_t v = 0; v < node_count; ++v) {
      if (!alive[v]) continue;
      const long delta = static_cast<long>(out[v].size()) - static_cast<long>(in[v].size());
      if (best == node_count || delta > best_delta) {
        best = v;
        best_delta = delta;
      }
    }
    head.push_back(best);
    remove(best);
  }

  FeedbackArcResult result;
  result.order = head;
  result.order.insert(result.order.end(), tail.rbegin(), tail.rend());
  std::vector<std::size_t> position(node_count);
  for (std::size_t i = 0; i < result.order.size(); ++i) position[result.order[i]] = i;
  for (const auto& e : edges) {
    if (position[e.first] < position[e.second]) {
      result.dag_edges.push_back(e);
    } else {
      result.removed_edges.push_back(e);
    }
  }
  return result;
}

namespace {

std::vector<CausalGraph::Edge> bidirected_from(const Eigen::MatrixXd& sigma,
                                               const std::vector<std::string>& nodes) {
  std::vector<CausalGraph::Edge> edges;
  for (Eigen::Index i = 0; i < sigma.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < sigma.cols(); ++j) {
      if (std::abs(sigma(i, j)) > 1e-12) {
        edges.emplace_back(nodes[static_cast<std::size_t>(i)], nodes[static_cast<std::size_t>(j)]);
      }
    }
  }
  return edges;
}

std::vector<double> uniform_coefficients(Rng& rng, std::size_t count) {
  std::vector<double> out(count);
  for (double& c : out) c = rng.uniform(-1.0, 1.0);
  return out;
}

}  // namespace

K3Coefficients default_k3_coefficients() {
  return {
      {0.0, 0.8},
      {0.0, 0.5, -0.6, 0.3},
      {0.5, 1.0, -0.8, 0.6, 0.4, -0.3, 0.5},
  };
}

Scm build_synthetic_k3(const std::optional<K3Coefficients>& coefficients, const Eigen::MatrixXd& sigma,
                       std::uint64_t seed) {
  const std::vector<std::string> nodes{"X1", "X2", "X3", "Y"};
  if (sigma.rows() != 4 || sigma.cols() != 4) throw StructuralError("K = 3 needs a 4x4 noise covariance");
  K3Coefficients coef;
  if (coefficients) {
    coef = *coefficients;
  } else {
    Rng rng(seed);
    coef.x2 = uniform_coefficients(rng, 2);
    coef.x3 = uniform_coefficients(rng, 4);
    coef.y = uniform_coefficients(rng, 7);
  }
  CausalGraph graph(nodes,
                    {{"X1", "X2"}, {"X1", "X3"}, {"X2", "X3"}, {"X1", "Y"}, {"X2", "Y"}, {"X3", "Y"}},
                    bidirected_from(sigma, nodes));
  std::vector<PolynomialEquation> equations{
      PolynomialEquation::constant("X1", 0.0),
      PolynomialEquation("X2", {"X1"}, coef.x2),
      PolynomialEquation("X3", {"X1", "X2"}, coef.x3),
      PolynomialEquation("Y", {"X1", "X2", "X3"}, coef.y),
  };
  return Scm(std::move(graph), std::move(equations), sigma);
}

Scm build_synthetic_k2(const std::vector<double>& x2, const std::vector<double>& y,
                       const Eigen::MatrixXd& sigma) {
  const std::vector<std::string> nodes{"X1", "X2", "Y"};
  if (sigma.rows() != 3 || sigma.cols() != 3) throw StructuralError("K = 2 needs a 3x3 noise covariance");
  CausalGraph graph(nodes, {{"X1", "X2"}, {"X1", "Y"}, {"X2", "Y"}}, bidirected_from(sigma, nodes));
  std::vector<PolynomialEquation> equations{
      PolynomialEquation::constant("X1", 0.0),
      PolynomialEquation("X2", {"X1"}, x2),
      PolynomialEquation("Y", {"X1", "X2"}, y),
  };
  return Scm(std::move(graph), std::move(equations), sigma);
}

Scm build_semisynthetic_10(std::uint64_t seed, double c) {
  constexpr std::size_t kNodes = 10;
  constexpr std::size_t kEdges = 15;
  constexpr Eigen::Index kPilotRows = 20000;

  // Graph: retry (deterministically) until the last node has at least two parents.
  std::vector<IndexEdge> dag;
  std::vector<std::size_t> order;
  for (std::uint64_t attempt = 0;; ++attempt) {
    Rng rng(derive_seed(seed, 1000 + attempt));
    std::set<IndexEdge> edge_set;
    while (edge_set.size() < kEdges) {
      const std::size_t a = rng.index(kNodes);
      const std::size_t b = rng.index(kNodes);
      if (a != b) edge_set.insert({a, b});
    }
    const std::vector<IndexEdge> raw(edge_set.begin(), edge_set.end());
    dag = feedback_arc_removal(kNodes, raw).dag_edges;
    order = topological_order(kNodes, dag);
    const std::size_t last = order.back();
    const auto parents = std::count_if(dag.begin(), dag.end(), [&](const IndexEdge& e) { return e.second == last; });
    if (parents >= 2) break;
  }

  // Relabel so that node i is the i-th vertex in topological order.
  std::vector<std::size_t> position(kNodes);
  for (std::size_t i = 0; i < kNodes; ++i) position[order[i]] = i;
  std::vector<std::string> names;
  for (std::size_t i = 0; i + 1 < kNodes; ++i) names.push_back("X" + std::to_string(i + 1));
  names.push_back("Y");
  std::vector<std::vector<std::size_t>> parents(kNodes);
  for (const auto& [a, b] : dag) parents[position[b]].push_back(position[a]);
  for (auto& p : parents) std::sort(p.begin(), p.end());
  std::vector<CausalGraph::Edge> directed;
  for (std::size_t child = 0; child < kNodes; ++child) {
    for (std::size_t p : parents[child]) directed.emplace_back(names[p], names[child]);
  }

  const Eigen::MatrixXd corr = random_correlation_matrix(kNodes, c, derive_seed(seed, 2));

  // Raw coefficients, then node-by-node standardization on a pilot sample.
  Rng coef_rng(derive_seed(seed, 3));
  Rng pilot_rng(derive_seed(seed, 4));
  const Eigen::MatrixXd factor = checked_cholesky(corr);
  Eigen::MatrixXd noise(kPilotRows, static_cast<Eigen::Index>(kNodes));
  for (Eigen::Index r = 0; r < kPilotRows; ++r) {
    Eigen::VectorXd z(static_cast<Eigen::Index>(kNodes));
    for (Eigen::Index j = 0; j < z.size(); ++j) z[j] = pilot_rng.normal();
    noise.row(r) = (factor * z).transpose();
  }
  Eigen::MatrixXd values(kPilotRows, static_cast<Eigen::Index>(kNodes));
  Eigen::VectorXd scale(static_cast<Eigen::Index>(kNodes));
  std::vector<PolynomialEquation> equations;
  for (std::size_t v = 0; v < kNodes; ++v) {
    std::vector<std::string> parent_names;
    for (std::size_t p : parents[v]) parent_names.push_back(names[p]);
    const std::size_t terms = PolynomialEquation::term_count(parents[v].size());
    std::vector<double> coef = parents[v].empty() ? std::vector<double>{0.0} : uniform_coefficients(coef_rng, terms);
    if (!parents[v].empty()) coef[0] = 0.0;

    Eigen::MatrixXd parent_cols(kPilotRows, static_cast<Eigen::Index>(parents[v].size()));
    for (std::size_t i = 0; i < parents[v].size(); ++i) {
      parent_cols.col(static_cast<Eigen::Index>(i)) = values.col(static_cast<Eigen::Index>(parents[v][i]));
    }
    const Eigen::VectorXd beta = Eigen::Map<const Eigen::VectorXd>(coef.data(), static_cast<Eigen::Index>(terms));
    const Eigen::VectorXd raw = feature_matrix(parent_cols) * beta + noise.col(static_cast<Eigen::Index>(v));
    const double mean = raw.mean();
    const double sd = std::sqrt((raw.array() - mean).square().sum() / static_cast<double>(kPilotRows - 1));
    coef[0] -= mean;
    for (double& x : coef) x /= sd;
    scale[static_cast<Eigen::Index>(v)] = sd;
    values.col(static_cast<Eigen::Index>(v)) = (raw.array() - mean) / sd;
    equations.emplace_back(names[v], std::move(parent_names), std::move(coef));
  }
  const Eigen::VectorXd inv = scale.cwiseInverse();
  Eigen::MatrixXd sigma = inv.asDiagonal() * corr * inv.asDiagonal();
  sigma = 0.5 * (sigma + sigma.transpose());
  return Scm(CausalGraph(names, std::move(directed), bidirected_from(sigma, names)), std::move(equations),
             std::move(sigma));
}

std::vector<RegimeDataset> generate_regime_suite(const Scm& scm, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw StructuralError("sample size must be positive");
  std::vector<RegimeDataset> suite;
  suite.push_back(sample(scm, Regime::observational(), n, derive_seed(seed, 0)));
  for (std::size_t k = 0; k < scm.treatment_count(); ++k) {
    const RegimeDataset marginal = sample(scm, Regime::observational(), n, derive_seed(seed, 3 * k + 1));
    Rng pick(derive_seed(seed, 3 * k + 2));
    std::vector<double> levels(n);
    for (double& level : levels) {
      level = marginal.values(static_cast<Eigen::Index>(pick.index(n)), static_cast<Eigen::Index>(k));
    }
    suite.push_back(sample_with_levels(scm, k, levels, derive_seed(seed, 3 * k + 3)));
  }
  return suite;
}

RegimeDataset StandardizeTransform::apply(const RegimeDataset& data) const {
  RegimeDataset out = data;
  out.values = (data.values.rowwise() - mean).array().rowwise() / scale.array();
  return out;
}

RegimeDataset StandardizeTransform::invert(const RegimeDataset& data) const {
  RegimeDataset out = data;
  out.values = (data.values.array().rowwise() * scale.array()).matrix().rowwise() + mean;
  return out;
}

std::pair<std::vector<RegimeDataset>, StandardizeTransform> standardize(
    std::span<const RegimeDataset> datasets) {
  const auto obs = std::find_if(datasets.begin(), datasets.end(),
                                [](const RegimeDataset& d) { return d.regime.is_observational(); });
  if (obs == datasets.end()) throw StructuralError("standardize needs an observational dataset");
  if (obs->rows() < 2) throw NumericalError("standardize needs at least two observational rows");
  StandardizeTransform transform;
  transform.mean = obs->values.colwise().mean();
  const Eigen::MatrixXd centered = obs->values.rowwise() - transform.mean;
  transform.scale =
      (centered.array().square().colwise().sum() / static_cast<double>(obs->rows() - 1)).sqrt().matrix();
  for (Eigen::Index j = 0; j < transform.scale.size(); ++j) {
    if (!(transform.scale[j] > 0.0)) {
      throw NumericalError("column " + obs->columns.at(static_cast<std::size_t>(j)) + " has zero variance");
    }
  }
  std::vector<RegimeDataset> out;
  for (const auto& ds : datasets) {
    if (ds.columns != obs->columns) throw StructuralError("datasets have different column sets");
    out.push_back(transform.apply(ds));
  }
  return {std::move(out), std::move(transform)};
}

}  // namespace jointfx
