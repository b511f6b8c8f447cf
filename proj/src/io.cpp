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

#include "jointfx/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "jointfx/errors.hpp"

namespace jointfx {

std::string format_number(double value) {
  if (!std::isfinite(value)) {
    if (std::isnan(value)) return "nan";
    return value > 0 ? "inf" : "-inf";
  }
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, result.ptr);
}

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& doc) {
  if (!doc.is_array()) throw StructuralError("matrix must be an array of rows");
  const Eigen::Index rows = static_cast<Eigen::Index>(doc.size());
  const Eigen::Index cols = rows == 0 ? 0 : static_cast<Eigen::Index>(doc.at(0).size());
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto& row = doc.at(static_cast<std::size_t>(i));
    if (static_cast<Eigen::Index>(row.size()) != cols) throw StructuralError("ragged matrix");
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = row.at(static_cast<std::size_t>(j)).get<double>();
  }
  return m;
}

namespace {

json edges_to_json(const std::vector<CausalGraph::Edge>& edges) {
  json out = json::array();
  for (const auto& [a, b] : edges) out.push_back(json::array({a, b}));
  return out;
}

std::vector<CausalGraph::Edge> edges_from_json(const json& doc) {
  std::vector<CausalGraph::Edge> edges;
  for (const auto& e : doc) {
    if (!e.is_array() || e.size() != 2) throw StructuralError("edge must be a pair of node names");
    edges.emplace_back(e[0].get<std::string>(), e[1].get<std::string>());
  }
  return edges;
}

}  // namespace

json graph_to_json(const CausalGraph& graph) {
  json doc;
  doc["nodes"] = graph.nodes();
  doc["directed_edges"] = edges_to_json(graph.directed_edges());
  doc["bidirected_edges"] = edges_to_json(graph.bidirected_edges());
  return doc;
}

CausalGraph graph_from_json(const json& doc) {
  try {
    return CausalGraph(doc.at("nodes").get<std::vector<std::string>>(),
                       edges_from_json(doc.at("directed_edges")),
                       doc.contains("bidirected_edges") ? edges_from_json(doc.at("bidirected_edges"))
                                                        : std::vector<CausalGraph::Edge>{});
  } catch (const json::exception& e) {
    throw StructuralError(std::string("malformed graph document: ") + e.what());
  }
}

json scm_to_json(const Scm& scm) {
  json doc = graph_to_json(scm.graph());
  json equations = json::object();
  for (const auto& eq : scm.equations()) {
    json entry;
    entry["parents"] = eq.parents();
    entry["coefficients"] = eq.coefficients();
    equations[eq.child()] = std::move(entry);
  }
  doc["equations"] = std::move(equations);
  doc["noise_cov"] = matrix_to_json(scm.noise_cov());
  json interventions = json::object();
  for (std::size_t i = 0; i < scm.fixed().size(); ++i) {
    if (scm.fixed()[i]) interventions[scm.graph().nodes()[i]] = *scm.fixed()[i];
  }
  if (!interventions.empty()) doc["interventions"] = std::move(interventions);
  return doc;
}

Scm scm_from_json(const json& doc) {
  CausalGraph graph = graph_from_json(doc);
  try {
    std::vector<PolynomialEquation> equations;
    const json& eqs = doc.at("equations");
    for (std::size_t i = 0; i < graph.node_count(); ++i) {
      const std::string& name = graph.nodes()[i];
      if (!eqs.contains(name)) {
        if (!graph.parents_of(i).empty()) throw StructuralError("missing equation for " + name);
        equations.push_back(PolynomialEquation::constant(name, 0.0));
        continue;
      }
      const json& e = eqs.at(name);
      equations.emplace_back(name, e.at("parents").get<std::vector<std::string>>(),
                             e.at("coefficients").get<std::vector<double>>());
    }
    std::vector<std::optional<double>> fixed(graph.node_count());
    if (doc.contains("interventions")) {
      for (const auto& [name, value] : doc.at("interventions").items()) {
        fixed[graph.index_of(name)] = value.get<double>();
      }
    }
    return Scm(std::move(graph), std::move(equations), matrix_from_json(doc.at("noise_cov")),
               std::move(fixed));
  } catch (const json::exception& e) {
    throw StructuralError(std::string("malformed SCM document: ") + e.what());
  }
}

std::string dump_json(const json& doc) { return doc.dump(2) + "\n"; }

json read_json_file(const std::string& path) {
  try {
    return json::parse(read_text_file(path));
  } catch (const json::parse_error& e) {
    throw StructuralError("cannot parse " + path + ": " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << text;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

// ---------------------------------------------------------------------------
// CSV

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else if (c != '\r') {
      field.push_back(c);
    }
  }
  fields.push_back(std::move(field));
  return fields;
}

double parse_number(const std::string& text) {
  double value = 0.0;
  const auto result = std::from_chars(text.data(), text.data() + text.size(), value);
  if (result.ec != std::errc() || result.ptr != text.data() + text.size()) {
    throw StructuralError("not a number: '" + text + "'");
  }
  return value;
}

bool next_data_line(std::istream& in, std::string& line) {
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    return true;
  }
  return false;
}

}  // namespace

void write_regime_csv(std::ostream& out, std::span<const RegimeDataset> datasets,
                      const std::string& comment) {
  if (datasets.empty()) throw StructuralError("no datasets to write");
  const auto& columns = datasets.front().columns;
  if (!comment.empty()) out << "# " << comment << '\n';
  out << "regime,level_target,level_value";
  for (const auto& c : columns) out << ',' << c;
  out << '\n';
  for (const auto& ds : datasets) {
    if (ds.columns != columns) throw StructuralError("datasets have different column sets");
    if (ds.regime.kind == Regime::Kind::joint_intervention) {
      throw StructuralError("regime CSV holds observational and single-intervention data only");
    }
    const bool obs = ds.regime.is_observational();
    const std::string label = obs ? "obs" : "do:" + columns.at(ds.regime.targets[0]);
    const std::string target = obs ? "" : columns.at(ds.regime.targets[0]);
    for (Eigen::Index r = 0; r < ds.values.rows(); ++r) {
      out << label << ',' << target << ',';
      if (!obs) out << format_number(ds.values(r, static_cast<Eigen::Index>(ds.regime.targets[0])));
      for (Eigen::Index c = 0; c < ds.values.cols(); ++c) out << ',' << format_number(ds.values(r, c));
      out << '\n';
    }
  }
}

std::vector<RegimeDataset> read_regime_csv(std::istream& in) {
  std::string line;
  if (!next_data_line(in, line)) throw StructuralError("regime CSV is empty");
  const auto header = split_csv_line(line);
  if (header.size() < 4 || header[0] != "regime" || header[1] != "level_target" ||
      header[2] != "level_value") {
    throw StructuralError("regime CSV header must start with regime,level_target,level_value");
  }
  const std::vector<std::string> columns(header.begin() + 3, header.end());

  std::vector<std::string> labels;
  std::vector<std::vector<std::vector<double>>> rows;
  std::size_t line_number = 1;
  while (next_data_line(in, line)) {
    ++line_number;
    const auto fields = split_csv_line(line);
    if (fields.size() != header.size()) {
      throw StructuralError("regime CSV line " + std::to_string(line_number) + ": expected " +
                            std::to_string(header.size()) + " fields");
    }
    std::vector<double> values;
    for (std::size_t i = 3; i < fields.size(); ++i) values.push_back(parse_number(fields[i]));
    const std::string& label = fields[0];
    if (label != "obs") {
      if (label.rfind("do:", 0) != 0 || label.substr(3) != fields[1]) {
        throw StructuralError("regime CSV line " + std::to_string(line_number) + ": bad regime '" +
                              label + "'");
      }
      const auto it = std::find(columns.begin(), columns.end(), fields[1]);
      if (it == columns.end()) throw StructuralError("unknown intervention target " + fields[1]);
      if (parse_number(fields[2]) != values[static_cast<std::size_t>(it - columns.begin())]) {
        throw StructuralError("regime CSV line " + std::to_string(line_number) +
                              ": level_value differs from the intervened column");
      }
    } else if (!fields[1].empty() || !fields[2].empty()) {
      throw StructuralError("observational rows must leave level columns empty");
    }
    auto pos = std::find(labels.begin(), labels.end(), label);
    if (pos == labels.end()) {
      labels.push_back(label);
      rows.emplace_back();
      pos = labels.end() - 1;
    }
    rows[static_cast<std::size_t>(pos - labels.begin())].push_back(std::move(values));
  }

  std::vector<RegimeDataset> datasets;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    RegimeDataset ds;
    ds.columns = columns;
    if (labels[i] == "obs") {
      ds.regime = Regime::observational();
    } else {
      const auto target = std::find(columns.begin(), columns.end(), labels[i].substr(3));
      ds.regime = Regime::single(static_cast<std::size_t>(target - columns.begin()));
    }
    ds.values.resize(static_cast<Eigen::Index>(rows[i].size()), static_cast<Eigen::Index>(columns.size()));
    for (std::size_t r = 0; r < rows[i].size(); ++r) {
      for (std::size_t c = 0; c < columns.size(); ++c) {
        ds.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[i][r][c];
      }
    }
    datasets.push_back(std::move(ds));
  }
  return datasets;
}

void write_matrix_csv(std::ostream& out, const std::vector<std::string>& header,
                      const Eigen::MatrixXd& values, const std::string& comment) {
  if (static_cast<Eigen::Index>(header.size()) != values.cols()) {
    throw StructuralError("CSV header does not match column count");
  }
  if (!comment.empty()) out << "# " << comment << '\n';
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << '\n';
  for (Eigen::Index r = 0; r < values.rows(); ++r) {
    for (Eigen::Index c = 0; c < values.cols(); ++c) out << (c ? "," : "") << format_number(values(r, c));
    out << '\n';
  }
}

Eigen::MatrixXd read_matrix_csv(std::istream& in, std::vector<std::string>* header) {
  std::string line;
  if (!next_data_line(in, line)) throw StructuralError("CSV is empty");
  const auto names = split_csv_line(line);
  std::vector<std::vector<double>> rows;
  while (next_data_line(in, line)) {
    const auto fields = split_csv_line(line);
    if (fields.size() != names.size()) throw StructuralError("CSV row has wrong field count");
    std::vector<double> row;
    for (const auto& f : fields) row.push_back(parse_number(f));
    rows.push_back(std::move(row));
  }
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(names.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < names.size(); ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    }
  }
  if (header) *header = names;
  return m;
}

}  // namespace jointfx
