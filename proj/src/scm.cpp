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

#include "jointfx/scm.hpp"

#include <algorithm>
#include <functional>
#include <queue>
#include <set>

#include "jointfx/errors.hpp"
#include "jointfx/rng.hpp"

namespace jointfx {

namespace {

struct OrderOrCycle {
  std::vector<std::size_t> order;
  std::vector<std::size_t> cycle;  // non-empty iff the graph is cyclic
};

OrderOrCycle order_or_cycle(std::size_t node_count, std::span<const IndexEdge> edges) {
  std::vector<std::vector<std::size_t>> children(node_count);
  std::vector<std::vector<std::size_t>> parents(node_count);
  std::vector<std::size_t> indegree(node_count, 0);
  for (const auto& [from, to] : edges) {
    if (from >= node_count || to >= node_count) throw StructuralError("edge endpoint out of range");
    children[from].push_back(to);
    parents[to].push_back(from);
    ++indegree[to];
  }

  OrderOrCycle result;
  std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
  for (std::size_t v = 0; v < node_count; ++v) {
    if (indegree[v] == 0) ready.push(v);
  }
  while (!ready.empty()) {
    const std::size_t v = ready.top();
    ready.pop();
    result.order.push_back(v);
    for (std::size_t c : children[v]) {
      if (--indegree[c] == 0) ready.push(c);
    }
  }
  if (result.order.size() == node_count) return result;

  // Every unplaced node has an unplaced parent, so walking parents revisits a node.
  std::size_t v = 0;
  while (indegree[v] == 0) ++v;
  std::vector<std::size_t> walk;
  std::vector<std::ptrdiff_t> seen_at(node_count, -1);
  while (seen_at[v] < 0) {
    seen_at[v] = static_cast<std::ptrdiff_t>(walk.size());
    walk.push_back(v);
    for (std::size_t p : parents[v]) {
      if (indegree[p] > 0) {
        v = p;
        break;
      }
    }
  }
  result.cycle.assign(walk.begin() + seen_at[v], walk.end());
  std::reverse(result.cycle.begin(), result.cycle.end());
  return result;
}

std::string describe_cycle(const std::vector<std::size_t>& cycle,
                           const std::function<std::string(std::size_t)>& name) {
  std::string text = "directed cycle detected: ";
  for (std::size_t node : cycle) text += name(node) + " -> ";
  return text + name(cycle.front());
}

}  // namespace

std::vector<std::size_t> topological_order(std::size_t node_count,
                                           std::span<const IndexEdge> edges) {
  auto result = order_or_cycle(node_count, edges);
  if (!result.cycle.empty()) {
    throw StructuralError(
        describe_cycle(result.cycle, [](std::size_t v) { return std::to_string(v); }));
  }
  return std::move(result.order);
}

CausalGraph::CausalGraph(std::vector<std::string> nodes, std::vector<Edge> directed_edges,
                         std::vector<Edge> bidirected_edges)
    : nodes_(std::move(nodes)), directed_(std::move(directed_edges)),
      bidirected_(std::move(bidirected_edges)) {
  if (nodes_.empty()) throw StructuralError("graph needs at least one node");
  std::set<std::string> unique(nodes_.begin(), nodes_.end());
  if (unique.size() != nodes_.size()) throw StructuralError("duplicate node names");

  std::vector<IndexEdge> indexed;
  std::set<IndexEdge> seen;
  parents_.assign(nodes_.size(), {});
  for (const auto& [from, to] : directed_) {
    const std::size_t a = index_of(from);
    const std::size_t b = index_of(to);
    if (a == b) throw StructuralError("self-loop on " + from);
    if (!seen.insert({a, b}).second) throw StructuralError("duplicate edge " + from + " -> " + to);
    if (a == outcome_index()) throw StructuralError("outcome " + from + " cannot have children");
    indexed.emplace_back(a, b);
    parents_[b].push_back(a);
  }
  for (auto& p : parents_) std::sort(p.begin(), p.end());

  std::set<IndexEdge> seen_bi;
  for (const auto& [u, v] : bidirected_) {
    const std::size_t a = index_of(u);
    const std::size_t b = index_of(v);
    if (a == b) throw StructuralError("bidirected self-loop on " + u);
    if (!seen_bi.insert({std::min(a, b), std::max(a, b)}).second) {
      throw StructuralError("duplicate bidirected edge " + u + " <-> " + v);
    }
  }

  auto result = order_or_cycle(nodes_.size(), indexed);
  if (!result.cycle.empty()) {
    throw StructuralError(describe_cycle(result.cycle, [this](std::size_t v) { return nodes_[v]; }));
  }
  order_ = std::move(result.order);
}

bool CausalGraph::contains(const std::string& name) const {
  return std::find(nodes_.begin(), nodes_.end(), name) != nodes_.end();
}

std::size_t CausalGraph::index_of(const std::string& name) const {
  const auto it = std::find(nodes_.begin(), nodes_.end(), name);
  if (it == nodes_.end()) throw StructuralError("unknown variable " + name);
  return static_cast<std::size_t>(it - nodes_.begin());
}

std::vector<std::size_t> CausalGraph::parents_of(std::size_t node) const { return parents_.at(node); }

std::vector<std::string> CausalGraph::parent_names(std::size_t node) const {
  std::vector<std::string> names;
  for (std::size_t p : parents_.at(node)) names.push_back(nodes_[p]);
  return names;
}

std::vector<std::string> topological_order(const CausalGraph& graph) {
  std::vector<std::string> names;
  for (std::size_t v : graph.order()) names.push_back(graph.nodes()[v]);
  return names;
}

// ---------------------------------------------------------------------------
// Regime

Regime Regime::single(std::size_t target, std::optional<double> level) {
  Regime r;
  r.kind = Kind::single_intervention;
  r.targets = {target};
  if (level) r.levels = {*level};
  return r;
}

Regime Regime::joint(std::vector<double> levels) {
  Regime r;
  r.kind = Kind::joint_intervention;
  for (std::size_t k = 0; k < levels.size(); ++k) r.targets.push_back(k);
  r.levels = std::move(levels);
  return r;
}

bool Regime::intervenes_on(std::size_t node) const {
  return std::find(targets.begin(), targets.end(), node) != targets.end();
}

std::string Regime::label(const CausalGraph& graph) const {
  if (is_observational()) return "obs";
  std::string text = "do:";
  for (std::size_t i = 0; i < targets.size(); ++i) {
    if (i > 0) text += ",";
    text += graph.nodes().at(targets[i]);
  }
  return text;
}

void Regime::validate(const CausalGraph& graph) const {
  switch (kind) {
    case Kind::observational:
      if (!targets.empty() || !levels.empty()) {
        throw StructuralError("observational regime cannot have targets");
      }
      return;
    case Kind::single_intervention:
      if (targets.size() != 1) throw StructuralError("single intervention needs exactly one target");
      if (targets[0] >= graph.treatment_count()) {
        throw StructuralError("single intervention target must be a treatment, not the outcome");
      }
      if (levels.size() > 1) throw StructuralError("single intervention takes at most one level");
      return;
    case Kind::joint_intervention:
      if (targets.size() != graph.treatment_count()) {
        throw StructuralError("joint intervention must target every treatment");
      }
      for (std::size_t k = 0; k < targets.size(); ++k) {
        if (targets[k] != k) throw StructuralError("joint intervention targets must be X_1..X_K");
      }
      if (levels.size() != targets.size()) {
        throw StructuralError("joint intervention needs one level per treatment");
      }
      return;
  }
}

std::size_t RegimeDataset::column_index(const std::string& name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) throw StructuralError("dataset has no column " + name);
  return static_cast<std::size_t>(it - columns.begin());
}

// ---------------------------------------------------------------------------
// Scm

Eigen::MatrixXd checked_cholesky(const Eigen::MatrixXd& cov, double pivot_tolerance) {
  if (cov.rows() != cov.cols()) throw NumericalError("covariance matrix must be square");
  if (!cov.allFinite()) throw NumericalError("covariance matrix has non-finite entries");
  const double scale = std::max(1.0, cov.cwiseAbs().maxCoeff());
  if ((cov - cov.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw NumericalError("covariance matrix is not symmetric");
  }
  const Eigen::Index d = cov.rows();
  Eigen::MatrixXd lower = Eigen::MatrixXd::Zero(d, d);
  for (Eigen::Index j = 0; j < d; ++j) {
    double pivot = cov(j, j) - lower.row(j).head(j).squaredNorm();
    if (!(pivot > pivot_tolerance)) {
      throw NumericalError("covariance matrix is not positive definite (pivot " +
                           std::to_string(j) + " = " + std::to_string(pivot) + ")");
    }
    lower(j, j) = std::sqrt(pivot);
    for (Eigen::Index i = j + 1; i < d; ++i) {
      lower(i, j) = (cov(i, j) - lower.row(i).head(j).dot(lower.row(j).head(j))) / lower(j, j);
    }
  }
  return lower;
}

Scm::Scm(CausalGraph graph, std::vector<PolynomialEquation> equations, Eigen::MatrixXd noise_cov,
         std::vector<std::optional<double>> fixed)
    : graph_(std::move(graph)), equations_(std::move(equations)), noise_cov_(std::move(noise_cov)),
      fixed_(std::move(fixed)) {
  const std::size_t n = graph_.node_count();
  if (fixed_.empty()) fixed_.assign(n, std::nullopt);
  if (equations_.size() != n) {
    throw StructuralError("expected one equation per node (" + std::to_string(n) + "), got " +
                          std::to_string(equations_.size()));
  }
  if (fixed_.size() != n) throw StructuralError("intervention list does not match node count");
  for (std::size_t i = 0; i < n; ++i) {
    const auto& eq = equations_[i];
    if (eq.child() != graph_.nodes()[i]) {
      throw StructuralError("equation " + std::to_string(i) + " is for " + eq.child() +
                            ", expected " + graph_.nodes()[i]);
    }
    const auto expected = graph_.parent_names(i);
    if (eq.parents() != expected) {
      std::set<std::string> a(eq.parents().begin(), eq.parents().end());
      std::set<std::string> b(expected.begin(), expected.end());
      if (a != b || a.size() != eq.parents().size()) {
        throw StructuralError("parents of " + eq.child() + " do not match the graph");
      }
    }
    if (fixed_[i] && (!eq.parents().empty() || eq.coefficients()[0] != *fixed_[i])) {
      throw StructuralError("intervened node " + eq.child() + " must have a constant equation");
    }
  }
  if (noise_cov_.rows() != static_cast<Eigen::Index>(n)) {
    throw StructuralError("noise covariance must be " + std::to_string(n) + "x" + std::to_string(n));
  }
  noise_factor_ = checked_cholesky(noise_cov_);
}

Scm apply_do(const Scm& scm, const std::map<std::string, double>& interventions) {
  const CausalGraph& g = scm.graph();
  auto fixed = scm.fixed();
  auto equations = scm.equations();
  for (const auto& [name, value] : interventions) {
    const std::size_t node = g.index_of(name);
    if (node == g.outcome_index()) throw StructuralError("cannot intervene on the outcome " + name);
    fixed[node] = value;
    equations[node] = PolynomialEquation::constant(name, value);
  }
  auto is_fixed = [&](const std::string& name) { return fixed[g.index_of(name)].has_value(); };
  std::vector<CausalGraph::Edge> directed;
  for (const auto& e : g.directed_edges()) {
    if (!is_fixed(e.second)) directed.push_back(e);
  }
  std::vector<CausalGraph::Edge> bidirected;
  for (const auto& e : g.bidirected_edges()) {
    if (!is_fixed(e.first) && !is_fixed(e.second)) bidirected.push_back(e);
  }
  return Scm(CausalGraph(g.nodes(), std::move(directed), std::move(bidirected)), std::move(equations),
             scm.noise_cov(), std::move(fixed));
}

namespace {

// Fills `row` by ancestral sampling; nodes with a level in `levels` are fixed.
void draw_row(const Scm& scm, const std::vector<std::optional<double>>& levels, Rng& rng,
              Eigen::VectorXd& z, Eigen::RowVectorXd& row,
              const std::vector<std::vector<std::size_t>>& parents, std::vector<double>& buffer) {
  const Eigen::Index d = z.size();
  for (Eigen::Index i = 0; i < d; ++i) z[i] = rng.normal();
  const Eigen::VectorXd u = scm.noise_factor().triangularView<Eigen::Lower>() * z;
  for (std::size_t v : scm.graph().order()) {
    if (levels[v]) {
      row[static_cast<Eigen::Index>(v)] = *levels[v];
      continue;
    }
    buffer.clear();
    for (std::size_t p : parents[v]) buffer.push_back(row[static_cast<Eigen::Index>(p)]);
    row[static_cast<Eigen::Index>(v)] =
        scm.equation(v).evaluate(buffer) + u[static_cast<Eigen::Index>(v)];
  }
}

std::vector<std::vector<std::size_t>> equation_parents(const Scm& scm) {
  std::vector<std::vector<std::size_t>> parents;
  for (const auto& eq : scm.equations()) {
    std::vector<std::size_t> idx;
    for (const auto& p : eq.parents()) idx.push_back(scm.graph().index_of(p));
    parents.push_back(std::move(idx));
  }
  return parents;
}

}  // namespace

RegimeDataset sample(const Scm& scm, const Regime& regime, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw StructuralError("sample size must be positive");
  regime.validate(scm.graph());
  if (!regime.is_observational() && regime.levels.size() != regime.targets.size()) {
    throw StructuralError("intervention levels are required for sampling; use sample_with_levels");
  }
  std::vector<std::optional<double>> levels = scm.fixed();
  for (std::size_t i = 0; i < regime.targets.size(); ++i) levels[regime.targets[i]] = regime.levels[i];

  const auto parents = equation_parents(scm);
  const Eigen::Index d = static_cast<Eigen::Index>(scm.graph().node_count());
  RegimeDataset data{regime, scm.graph().nodes(), Eigen::MatrixXd(static_cast<Eigen::Index>(n), d)};
  Rng rng(seed);
  Eigen::VectorXd z(d);
  Eigen::RowVectorXd row(d);
  std::vector<double> buffer;
  for (Eigen::Index r = 0; r < data.values.rows(); ++r) {
    draw_row(scm, levels, rng, z, row, parents, buffer);
    data.values.row(r) = row;
  }
  return data;
}

RegimeDataset sample_with_levels(const Scm& scm, std::size_t target, std::span<const double> levels,
                                 std::uint64_t seed) {
  if (levels.empty()) throw StructuralError("sample size must be positive");
  const Regime regime = Regime::single(target);
  regime.validate(scm.graph());
  auto fixed = scm.fixed();
  const auto parents = equation_parents(scm);
  const Eigen::Index d = static_cast<Eigen::Index>(scm.graph().node_count());
  RegimeDataset data{regime, scm.graph().nodes(),
                     Eigen::MatrixXd(static_cast<Eigen::Index>(levels.size()), d)};
  Rng rng(seed);
  Eigen::VectorXd z(d);
  Eigen::RowVectorXd row(d);
  std::vector<double> buffer;
  for (Eigen::Index r = 0; r < data.values.rows(); ++r) {
    fixed[target] = levels[static_cast<std::size_t>(r)];
    draw_row(scm, fixed, rng, z, row, parents, buffer);
    data.values.row(r) = row;
  }
  return data;
}

double joint_effect_oracle(const Scm& scm, std::span<const double> x) {
  const CausalGraph& g = scm.graph();
  if (x.size() != g.treatment_count()) {
    throw StructuralError("joint effect needs " + std::to_string(g.treatment_count()) +
                          " treatment levels, got " + std::to_string(x.size()));
  }
  const auto& eq = scm.equation(g.outcome_index());
  std::vector<double> values;
  for (const auto& p : eq.parents()) values.push_back(x[g.index_of(p)]);
  return eq.evaluate(values);
}

Eigen::MatrixXd structural_residuals(const Scm& scm, const RegimeDataset& data) {
  const auto parents = equation_parents(scm);
  Eigen::MatrixXd residuals(data.values.rows(), data.values.cols());
  std::vector<double> buffer;
  for (Eigen::Index r = 0; r < data.values.rows(); ++r) {
    for (std::size_t v = 0; v < parents.size(); ++v) {
      buffer.clear();
      for (std::size_t p : parents[v]) buffer.push_back(data.values(r, static_cast<Eigen::Index>(p)));
      residuals(r, static_cast<Eigen::Index>(v)) =
          data.values(r, static_cast<Eigen::Index>(v)) - scm.equation(v).evaluate(buffer);
    }
  }
  return residuals;
}

}  // namespace jointfx
