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
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "jointfx/bootstrap.hpp"
#include "jointfx/counterexample.hpp"
#include "jointfx/estimator.hpp"
#include "jointfx/io.hpp"
#include "jointfx/scm.hpp"

namespace jointfx {

enum class ExperimentKind { consistency, bias, confounding, uncertainty, counterexample, identify2_check };

std::string to_string(ExperimentKind kind);
/// Accepts "identify2-check" and "identify2_check". Throws StructuralError otherwise.
ExperimentKind parse_experiment_kind(const std::string& name);

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::consistency;
  std::vector<std::size_t> sample_sizes;
  std::vector<double> confounding_levels;
  std::size_t replications = 1;
  std::size_t test_points = 1;
  std::uint64_t seed = 1;
  std::string output_dir = ".";
  std::size_t bootstrap_replicates = 50;
  double interval_level = 0.95;
  /// Mixing probabilities for the binary counterexample.
  std::vector<double> probabilities;
  /// Points per axis of the identify2-check grid.
  std::size_t grid_points = 5;
  /// Columns the uncertainty experiment's KDE runs on: "parents" (of Y) or "treatments".
  std::string kde_variables = "parents";
  FitConfig fit;

  static ExperimentConfig defaults(ExperimentKind kind);
  /// Throws StructuralError on non-positive counts or out-of-range values.
  void validate() const;
};

json experiment_config_to_json(const ExperimentConfig& config);
/// Starts from the defaults of the document's "kind" (or `kind` when the
/// document has none) and overrides present keys. Unknown keys are rejected.
ExperimentConfig experiment_config_from_json(const json& doc, std::optional<ExperimentKind> kind = std::nullopt);

/// Mean with a normal-approximation 95% interval over replications.
struct SummaryStat {
  double mean = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  std::size_t count = 0;
};
SummaryStat summarize(const std::vector<double>& values);

struct MetricRow {
  double level = 0.0;  // sample size or confounding bound
  std::string method;  // ANM, REG or ORACLE
  std::string metric;  // effect_mae, spearman, param_mae, param_mae_all
  SummaryStat stat;
};

struct ReplicationValue {
  double level = 0.0;
  std::size_t replication = 0;
  std::string method;
  std::string metric;
  double value = 0.0;
};

struct MetricReport {
  std::string condition;  // "n" or "c"
  std::vector<MetricRow> rows;
  std::vector<ReplicationValue> replications;
  /// Failed replications per level, in level order.
  std::vector<std::pair<double, std::size_t>> failures;
  Scm truth;  // ground truth of the first level

  const MetricRow& at(double level, const std::string& method, const std::string& metric) const;
};

MetricReport run_consistency(const ExperimentConfig& config);
MetricReport run_confounding(const ExperimentConfig& config);

struct BiasRow {
  std::string method;
  std::string equation;
  std::string term;
  double truth = 0.0;
  double mean = 0.0;
  double bias = 0.0;
  double se = 0.0;
  std::size_t count = 0;
  double z() const;
};

struct BiasTable {
  std::size_t n = 0;
  double c = 0.0;
  std::vector<BiasRow> rows;
  std::size_t failures = 0;
  Scm truth;
};

BiasTable run_bias(const ExperimentConfig& config);

struct UncertaintyResult {
  Eigen::MatrixXd points;
  std::vector<double> truth;
  std::vector<double> prediction;
  std::vector<PredictionInterval> intervals;
  std::vector<std::size_t> kde_ranks;
  std::optional<double> width_rank_spearman;
  std::size_t failures = 0;
  Scm truth_scm;
};

UncertaintyResult run_uncertainty(const ExperimentConfig& config);

struct Identify2CheckRow {
  std::size_t replication = 0;
  double x1 = 0.0;
  double x2 = 0.0;
  double truth = 0.0;
  double constructive = 0.0;
  double anm = 0.0;
  PredictionInterval interval;
  bool agree() const;
};

struct Identify2SigmaRow {
  std::size_t replication = 0;
  double sigma_y1 = 0.0;
  double sigma_y2 = 0.0;
};

struct Identify2Check {
  std::vector<Identify2CheckRow> rows;
  std::vector<Identify2SigmaRow> sigmas;
  double true_sigma_y1 = 0.0;
  double true_sigma_y2 = 0.0;
  std::size_t failures = 0;
  Scm truth;
};

/// Two-treatment SCM used by the identify2 cross-check.
Scm identify2_check_scm(double c, std::uint64_t seed);

Identify2Check run_identify2_check(const ExperimentConfig& config);

std::vector<UnidentifiabilityReport> run_counterexample(const ExperimentConfig& config);

/// File name -> content. Every CSV starts with a manifest reference line.
using OutputFiles = std::map<std::string, std::string>;

inline constexpr const char* kManifestName = "run_manifest.json";

/// Runs the configured experiment and renders its output files (the manifest
/// itself is written by the caller).
OutputFiles run_experiment(const ExperimentConfig& config);

}  // namespace jointfx
