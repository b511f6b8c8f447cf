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

#include "jointfx/model_io.hpp"

#include <set>

#include "jointfx/errors.hpp"

namespace jointfx {

json fit_config_to_json(const FitConfig& config) {
  json doc;
  doc["theta_step"] = config.theta_step == FitConfig::ThetaStep::newton ? "newton" : "gradient";
  doc["tol_inner_per_row"] = config.tol_inner_per_row;
  doc["tol_outer_per_row"] = config.tol_outer_per_row;
  doc["max_rounds"] = config.max_rounds;
  doc["max_inner_steps"] = config.max_inner_steps;
  doc["armijo"] = config.armijo;
  doc["max_halvings"] = config.max_halvings;
  doc["jitter"] = config.jitter;
  doc["eigen_floor"] = config.eigen_floor;
  doc["ridge"] = config.ridge;
  return doc;
}

FitConfig fit_config_from_json(const json& doc) {
  if (!doc.is_object()) throw StructuralError("fit config must be a JSON object");
  static const std::set<std::string> known{"theta_step", "tol_inner_per_row", "tol_outer_per_row",
                                           "max_rounds", "max_inner_steps",   "armijo",
                                           "max_halvings", "jitter",          "eigen_floor",
                                           "ridge"};
  for (const auto& [key, value] : doc.items()) {
    if (!known.contains(key)) throw StructuralError("unknown fit config key: " + key);
  }
  FitConfig config;
  try {
    if (doc.contains("theta_step")) {
      const std::string step = doc.at("theta_step").get<std::string>();
      if (step == "newton") {
        config.theta_step = FitConfig::ThetaStep::newton;
      } else if (step == "gradient") {
        config.theta_step = FitConfig::ThetaStep::gradient;
      } else {
        throw StructuralError("theta_step must be \"newton\" or \"gradient\"");
      }
    }
    config.tol_inner_per_row = doc.value("tol_inner_per_row", config.tol_inner_per_row);
    config.tol_outer_per_row = doc.value("tol_outer_per_row", config.tol_outer_per_row);
    config.max_rounds = doc.value("max_rounds", config.max_rounds);
    config.max_inner_steps = doc.value("max_inner_steps", config.max_inner_steps);
    config.armijo = doc.value("armijo", config.armijo);
    config.max_halvings = doc.value("max_halvings", config.max_halvings);
    config.jitter = doc.value("jitter", config.jitter);
    config.eigen_floor = doc.value("eigen_floor", config.eigen_floor);
    config.ridge = doc.value("ridge", config.ridge);
  } catch (const json::exception& e) {
    throw StructuralError(std::string("invalid fit config: ") + e.what());
  }
  if (config.max_rounds == 0) throw StructuralError("max_rounds must be positive");
  if (config.ridge < 0.0) throw StructuralError("ridge must be non-negative");
  return config;
}

json model_to_json(const FittedAnm& model) {
  json doc = graph_to_json(model.graph);
  json equations = json::object();
  for (const auto& eq : model.equations) {
    json entry;
    entry["parents"] = eq.parents();
    entry["coefficients"] = eq.coefficients();
    equations[eq.child()] = std::move(entry);
  }
  doc["equations"] = std::move(equations);
  doc["noise_cov"] = matrix_to_json(model.noise_covs.sigma0);
  json covs;
  covs["sigma0"] = matrix_to_json(model.noise_covs.sigma0);
  json per_regime = json::array();
  for (const auto& s : model.noise_covs.sigma_k) per_regime.push_back(matrix_to_json(s));
  covs["sigma_k"] = std::move(per_regime);
  covs["jittered"] = model.noise_covs.jittered;
  doc["noise_covs"] = std::move(covs);
  doc["fit_trace"] = model.fit_trace;
  doc["status"] = model.status == FittedAnm::Status::converged ? "converged" : "max_rounds_reached";
  doc["rounds"] = model.rounds;
  doc["config_used"] = fit_config_to_json(model.config_used);
  return doc;
}

FittedAnm model_from_json(const json& doc) {
  FittedAnm model;
  try {
    model.graph = graph_from_json(doc);
    const json& eqs = doc.at("equations");
    for (std::size_t v = 0; v < model.graph.node_count(); ++v) {
      const std::string& name = model.graph.nodes()[v];
      const json& e = eqs.at(name);
      model.equations.emplace_back(name, e.at("parents").get<std::vector<std::string>>(),
                                   e.at("coefficients").get<std::vector<double>>());
    }
    const json& covs = doc.at("noise_covs");
    model.noise_covs.sigma0 = matrix_from_json(covs.at("sigma0"));
    for (const auto& s : covs.at("sigma_k")) model.noise_covs.sigma_k.push_back(matrix_from_json(s));
    model.noise_covs.jittered = covs.value("jittered", false);
    model.fit_trace = doc.value("fit_trace", std::vector<double>{});
    model.status = doc.value("status", std::string("converged")) == "converged"
                       ? FittedAnm::Status::converged
                       : FittedAnm::Status::max_rounds_reached;
    model.rounds = doc.value("rounds", std::size_t{0});
    if (doc.contains("config_used")) model.config_used = fit_config_from_json(doc.at("config_used"));
  } catch (const json::exception& e) {
    throw StructuralError(std::string("invalid model document: ") + e.what());
  }
  return model;
}

}  // namespace jointfx
