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

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "jointfx/scm.hpp"

namespace jointfx {

using json = nlohmann::ordered_json;

/// Shortest decimal text that round-trips the double (17 significant digits max).
std::string format_number(double value);

// SCM JSON document:
//   { "nodes": [...], "directed_edges": [[p, c], ...], "bidirected_edges": [[a, b], ...],
//     "equations": { child: { "parents": [...], "coefficients": [...] } },
//     "noise_cov": [[...], ...] }            (row-major, one array per row)
// plus "interventions": { node: value } for SCMs produced by apply_do.
json graph_to_json(const CausalGraph& graph);
CausalGraph graph_from_json(const json& doc);
json scm_to_json(const Scm& scm);
Scm scm_from_json(const json& doc);

json matrix_to_json(const Eigen::MatrixXd& m);
Eigen::MatrixXd matrix_from_json(const json& doc);

/// Serialized JSON with a trailing newline; key order is insertion order.
std::string dump_json(const json& doc);
json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

// Regime CSV:
//   header  regime,level_target,level_value,X1,...,XK,Y
//   regime  "obs" or "do:Xk"; level columns empty for obs.
// Lines starting with '#' are comments (used for the manifest reference).
void write_regime_csv(std::ostream& out, std::span<const RegimeDataset> datasets,
                      const std::string& comment = {});
std::vector<RegimeDataset> read_regime_csv(std::istream& in);

/// Plain numeric CSV with a header row (e.g. joint-intervention test points).
void write_matrix_csv(std::ostream& out, const std::vector<std::string>& header,
                      const Eigen::MatrixXd& values, const std::string& comment = {});
Eigen::MatrixXd read_matrix_csv(std::istream& in, std::vector<std::string>* header = nullptr);

}  // namespace jointfx
