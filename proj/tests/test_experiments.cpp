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

#include <cmath>
#include <string>

#include <gtest/gtest.h>

#include "jointfx/errors.hpp"
#include "jointfx/experiments.hpp"

namespace jointfx {
namespace {

ExperimentConfig tiny(ExperimentKind kind) {
  ExperimentConfig c = ExperimentConfig::defaults(kind);
  c.sample_sizes = {200};
  c.replications = 2;
  c.test_points = 50;
  c.bootstrap_replicates = 4;
  c.seed = 3;
  return c;
}

bool starts_with_manifest(const std::string& text) { return text.rfind("# manifest: run_manifest.json\n", 0) == 0; }

TEST(ExperimentKind, NamesRoundTrip) {
  for (auto kind : {ExperimentKind::consistency, ExperimentKind::bias, ExperimentKind::confounding,
                    ExperimentKind::uncertainty, ExperimentKind::counterexample, ExperimentKind::identify2_check}) {
    EXPECT_EQ(parse_experiment_kind(to_string(kind)), kind);
  }
  EXPECT_EQ(parse_experiment_kind("identify2_check"), ExperimentKind::identify2_check);
  EXPECT_THROW(parse_experiment_kind("figure2"), StructuralError);
}

TEST(ExperimentConfig, DefaultsAreValid) {
  for (auto kind : {ExperimentKind::consistency, ExperimentKind::bias, ExperimentKind::confounding,
                    ExperimentKind::uncertainty, ExperimentKind::counterexample, ExperimentKind::identify2_check}) {
    EXPECT_NO_THROW(ExperimentConfig::defaults(kind).validate()) << to_string(kind);
  }
  const auto consistency = ExperimentConfig::defaults(ExperimentKind::consistency);
  EXPECT_EQ(consistency.sample_sizes, (std::vector<std::size_t>{100, 400, 1600, 6400, 25600}));
  EXPECT_EQ(consistency.test_points, 100000u);
  EXPECT_EQ(ExperimentConfig::defaults(ExperimentKind::bias).sample_sizes, std::vector<std::size_t>{1600});
  EXPECT_EQ(ExperimentConfig::defaults(ExperimentKind::uncertainty).bootstrap_replicates, 50u);
}

TEST(ExperimentConfig, JsonRoundTripAndOverrides) {
  ExperimentConfig c = tiny(ExperimentKind::confounding);
  c.confounding_levels = {0.2, 0.4};
  c.fit.max_rounds = 17;
  const ExperimentConfig back = experiment_config_from_json(experiment_config_to_json(c));
  EXPECT_EQ(experiment_config_to_json(back), experiment_config_to_json(c));

  const json partial = {{"kind", "bias"}, {"replications", 7}};
  const ExperimentConfig bias = experiment_config_from_json(partial);
  EXPECT_EQ(bias.kind, ExperimentKind::bias);
  EXPECT_EQ(bias.replications, 7u);
  EXPECT_EQ(bias.sample_sizes, std::vector<std::size_t>{1600});

  const ExperimentConfig by_arg = experiment_config_from_json(json{{"seed", 9}}, ExperimentKind::uncertainty);
  EXPECT_EQ(by_arg.kind, ExperimentKind::uncertainty);
  EXPECT_EQ(by_arg.seed, 9u);
}

TEST(ExperimentConfig, RejectsBadDocuments) {
  EXPECT_THROW(experiment_config_from_json(json{{"kind", "bias"}, {"sample_size", 5}}), StructuralError);
  EXPECT_THROW(experiment_config_from_json(json{{"kind", "bias"}}, ExperimentKind::consistency), StructuralError);
  EXPECT_THROW(experiment_config_from_json(json{{"replications", 3}}), StructuralError);
  EXPECT_THROW(experiment_config_from_json(json{{"kind", "bias"}, {"replications", "three"}}), StructuralError);
  EXPECT_THROW(experiment_config_from_json(json{{"kind", "bias"}, {"confounding_levels", {1.0}}}), StructuralError);
  EXPECT_THROW(experiment_config_from_json(json::array()), StructuralError);
  ExperimentConfig c = tiny(ExperimentKind::uncertainty);
  c.kde_variables = "all";
  EXPECT_THROW(c.validate(), StructuralError);
  c = tiny(ExperimentKind::counterexample);
  c.probabilities = {0.0};
  EXPECT_THROW(c.validate(), StructuralError);
}

TEST(Summarize, NormalInterval) {
  const SummaryStat s = summarize({1.0, 2.0, 3.0, 4.0});
  EXPECT_DOUBLE_EQ(s.mean, 2.5);
  const double se = std::sqrt(5.0 / 3.0) / 2.0;
  EXPECT_NEAR(s.upper - s.mean, 1.96 * se, 1e-12);
  EXPECT_NEAR(s.mean - s.lower, 1.96 * se, 1e-12);
  EXPECT_EQ(s.count, 4u);
}

TEST(RunExperiment, ConsistencyIsDeterministic) {
  const ExperimentConfig c = tiny(ExperimentKind::consistency);
  const OutputFiles first = run_experiment(c);
  const OutputFiles second = run_experiment(c);
  EXPECT_EQ(first, second);
  ASSERT_TRUE(first.contains("consistency.csv"));
  EXPECT_TRUE(first.contains("consistency_replications.csv"));
  EXPECT_TRUE(first.contains("truth_scm.json"));
  for (const auto& [name, text] : first) {
    if (name.ends_with(".csv")) {
      EXPECT_TRUE(starts_with_manifest(text)) << name;
    }
  }
}

TEST(RunExperiment, ConsistencyReportHasEveryMethod) {
  const MetricReport report = run_consistency(tiny(ExperimentKind::consistency));
  EXPECT_EQ(report.condition, "n");
  for (const char* method : {"ANM", "REG"}) {
    for (const char* metric : {"effect_mae", "spearman", "param_mae"}) {
      EXPECT_EQ(report.at(200, method, metric).stat.count, 2u) << method << " " << metric;
    }
  }
  EXPECT_THROW(report.at(201, "ANM", "effect_mae"), std::out_of_range);
}

TEST(RunExperiment, ConfoundingHasOracleRows) {
  ExperimentConfig c = tiny(ExperimentKind::confounding);
  c.confounding_levels = {0.1, 0.8};
  const MetricReport report = run_confounding(c);
  EXPECT_EQ(report.condition, "c");
  for (double level : {0.1, 0.8}) {
    EXPECT_EQ(report.at(level, "ORACLE", "effect_mae").stat.mean, 0.0);
    EXPECT_NEAR(report.at(level, "ORACLE", "spearman").stat.mean, 1.0, 1e-9);
  }
}

TEST(RunExperiment, BiasTableCoversEveryCoefficient) {
  ExperimentConfig c = tiny(ExperimentKind::bias);
  const BiasTable table = run_bias(c);
  std::size_t anm = 0, reg = 0;
  for (const auto& row : table.rows) {
    (row.method == "ANM" ? anm : reg) += 1;
    EXPECT_EQ(row.count, 2u);
  }
  EXPECT_EQ(anm, 1u + 2u + 4u + 7u);
  EXPECT_EQ(reg, 7u);
}

TEST(RunExperiment, UncertaintyProducesIntervalsAndRanks) {
  ExperimentConfig c = tiny(ExperimentKind::uncertainty);
  c.test_points = 6;
  const UncertaintyResult result = run_uncertainty(c);
  ASSERT_EQ(result.intervals.size(), 6u);
  EXPECT_EQ(result.kde_ranks.size(), 6u);
  for (const auto& iv : result.intervals) EXPECT_LE(iv.lower, iv.upper);
  const OutputFiles files = run_experiment(c);
  EXPECT_TRUE(starts_with_manifest(files.at("uncertainty.csv")));
}

TEST(RunExperiment, Identify2CheckRowsPerGridPoint) {
  ExperimentConfig c = tiny(ExperimentKind::identify2_check);
  c.sample_sizes = {2000};
  c.grid_points = 3;
  c.replications = 1;
  const Identify2Check check = run_identify2_check(c);
  EXPECT_EQ(check.rows.size() + 9 * check.failures, 9u);
  EXPECT_EQ(check.sigmas.size() + check.failures, 1u);
  EXPECT_NE(check.true_sigma_y1, 0.0);
}

TEST(RunExperiment, CounterexampleCsvAndText) {
  const OutputFiles files = run_experiment(ExperimentConfig::defaults(ExperimentKind::counterexample));
  ASSERT_TRUE(files.contains("counterexample.csv"));
  EXPECT_TRUE(starts_with_manifest(files.at("counterexample.csv")));
  EXPECT_NE(files.at("counterexample.txt").find("0.5"), std::string::npos);
}

}  // namespace
}  // namespace jointfx
