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

#include "jointfx/counterexample.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>

#include "jointfx/errors.hpp"
#include "jointfx/io.hpp"

namespace jointfx {

DiscreteScm::DiscreteScm(Variant variant, double p) : variant_(variant), p_(p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::invalid_argument("Bernoulli parameter must lie strictly between 0 and 1");
  }
}

CausalGraph DiscreteScm::graph() {
  return CausalGraph({"X1", "X2", "Y"}, {{"X1", "X2"}, {"X1", "Y"}, {"X2", "Y"}},
                     {{"X1", "X2"}, {"X1", "Y"}, {"X2", "Y"}});
}

double ProbabilityTable::probability(const std::vector<int>& values) const {
  for (const auto& e : entries) {
    if (e.values == values) return e.probability;
  }
  throw std::out_of_range("assignment not in table");
}

double ProbabilityTable::total() const {
  double sum = 0.0;
  for (const auto& e : entries) sum += e.probability;
  return sum;
}

ProbabilityTable enumerate_distribution(const DiscreteScm& scm, const Regime& regime) {
  const CausalGraph graph = DiscreteScm::graph();
  int fixed[2] = {-1, -1};
  if (regime.kind == Regime::Kind::single_intervention ||
      regime.kind == Regime::Kind::joint_intervention) {
    regime.validate(graph);
    if (regime.levels.size() != regime.targets.size()) {
      throw StructuralError("intervention levels are required");
    }
    for (std::size_t i = 0; i < regime.targets.size(); ++i) {
      const double level = regime.levels[i];
      if (level != 0.0 && level != 1.0) throw StructuralError("binary variables take levels 0 or 1");
      fixed[regime.targets[i]] = static_cast<int>(level);
    }
  } else {
    regime.validate(graph);
  }

  ProbabilityTable table;
  std::vector<std::size_t> free_nodes;
  for (std::size_t v = 0; v < 3; ++v) {
    if (v < 2 && fixed[v] >= 0) continue;
    free_nodes.push_back(v);
    table.variables.push_back(graph.nodes()[v]);
  }
  for (std::size_t code = 0; code < (1u << free_nodes.size()); ++code) {
    ProbabilityTable::Entry entry;
    for (std::size_t i = 0; i < free_nodes.size(); ++i) {
      entry.values.push_back(static_cast<int>((code >> (free_nodes.size() - 1 - i)) & 1u));
    }
    table.entries.push_back(std::move(entry));
  }

  for (int u = 0; u <= 1; ++u) {
    const double weight = u == 1 ? scm.p() : 1.0 - scm.p();
    const int x1 = fixed[0] >= 0 ? fixed[0] : u;
    const int x2 = fixed[1] >= 0 ? fixed[1] : (x1 & u);
    const int y = scm.variant() == DiscreteScm::Variant::conjunctive ? (x1 & x2 & u) : (x2 & u);
    const int all[3] = {x1, x2, y};
    std::vector<int> key;
    for (std::size_t v : free_nodes) key.push_back(all[v]);
    for (auto& e : table.entries) {
      if (e.values == key) e.probability += weight;
    }
  }
  return table;
}

double total_variation(const ProbabilityTable& a, const ProbabilityTable& b) {
  if (a.variables != b.variables || a.entries.size() != b.entries.size()) {
    throw StructuralError("tables are over different variables");
  }
  double l1 = 0.0;
  for (const auto& e : a.entries) l1 += std::abs(e.probability - b.probability(e.values));
  return 0.5 * l1;
}

namespace {

RegimeComparison compare(const std::string& label, const Regime& regime, double p) {
  RegimeComparison cmp;
  cmp.regime = label;
  cmp.conjunctive = enumerate_distribution(DiscreteScm(DiscreteScm::Variant::conjunctive, p), regime);
  cmp.collapsed = enumerate_distribution(DiscreteScm(DiscreteScm::Variant::collapsed, p), regime);
  for (const auto& e : cmp.conjunctive.entries) {
    cmp.max_abs_difference =
        std::max(cmp.max_abs_difference, std::abs(e.probability - cmp.collapsed.probability(e.values)));
  }
  return cmp;
}

Regime joint_binary(int x1, int x2) {
  Regime r;
  r.kind = Regime::Kind::joint_intervention;
  r.targets = {0, 1};
  r.levels = {static_cast<double>(x1), static_cast<double>(x2)};
  return r;
}

}  // namespace

UnidentifiabilityReport verify_unidentifiability(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::invalid_argument("p must lie strictly between 0 and 1 (p = 0 or 1 is degenerate)");
  }
  UnidentifiabilityReport report;
  report.p = p;
  report.shared.push_back(compare("obs", Regime::observational(), p));
  for (std::size_t target : {std::size_t{0}, std::size_t{1}}) {
    for (int level : {0, 1}) {
      const std::string label = "do(X" + std::to_string(target + 1) + "=" + std::to_string(level) + ")";
      report.shared.push_back(compare(label, Regime::single(target, level), p));
    }
  }
  report.shared_regimes_agree = true;
  for (const auto& c : report.shared) {
    if (c.max_abs_difference != 0.0) report.shared_regimes_agree = false;
  }
  report.joint = compare("do(X1=0,X2=1)", joint_binary(0, 1), p);
  report.joint_tv_distance = total_variation(report.joint.conjunctive, report.joint.collapsed);
  return report;
}

namespace {

void print_comparison(std::ostream& out, const RegimeComparison& c) {
  out << c.regime << '\n';
  out << "  ";
  for (const auto& v : c.conjunctive.variables) out << std::setw(4) << v;
  out << std::setw(12) << "M_conj" << std::setw(12) << "M_coll" << '\n';
  for (const auto& e : c.conjunctive.entries) {
    out << "  ";
    for (int v : e.values) out << std::setw(4) << v;
    out << std::setw(12) << std::setprecision(6) << e.probability << std::setw(12)
        << c.collapsed.probability(e.values) << '\n';
  }
}

}  // namespace

void print_report(std::ostream& out, const UnidentifiabilityReport& report) {
  out << "p = " << report.p << '\n';
  out << "M_conj: Y = X1 & X2 & U_Y, X2 = X1 & U_2, X1 = U_1\n";
  out << "M_coll: Y = X2 & U_Y,      X2 = X1 & U_2, X1 = U_1\n";
  out << "shared noise U_Y = U_2 = U_1 ~ Bernoulli(p)\n\n";
  for (const auto& c : report.shared) print_comparison(out, c);
  out << '\n' << "shared regimes agree: " << (report.shared_regimes_agree ? "yes" : "no") << "\n\n";
  print_comparison(out, report.joint);
  out << '\n' << "TV distance at do(X1=0,X2=1): " << report.joint_tv_distance << '\n';
}

void write_report_csv(std::ostream& out, const UnidentifiabilityReport& report,
                      const std::string& comment) {
  if (!comment.empty()) out << "# " << comment << '\n';
  out << "p,regime,X1,X2,Y,prob_conj,prob_coll\n";
  auto emit = [&](const RegimeComparison& c) {
    for (const auto& e : c.conjunctive.entries) {
      std::string cells[3] = {"", "", ""};
      for (std::size_t i = 0; i < e.values.size(); ++i) {
        const std::string& var = c.conjunctive.variables[i];
        cells[var == "X1" ? 0 : var == "X2" ? 1 : 2] = std::to_string(e.values[i]);
      }
      out << format_number(report.p) << ",\"" << c.regime << "\"," << cells[0] << ',' << cells[1]
          << ',' << cells[2] << ',' << format_number(e.probability) << ','
          << format_number(c.collapsed.probability(e.values)) << '\n';
    }
  };
  for (const auto& c : report.shared) emit(c);
  emit(report.joint);
  out << format_number(report.p) << ",tv_distance,,,," << format_number(report.joint_tv_distance)
      << ',' << '\n';
}

}  // namespace jointfx
