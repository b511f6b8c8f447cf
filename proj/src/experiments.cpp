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

#include "jointfx/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "jointfx/errors.hpp"
#include "jointfx/identify2.hpp"
#include "jointfx/metrics.hpp"
#include "jointfx/model_io.hpp"
#include "jointfx/rng.hpp"
#include "jointfx/simgen.hpp"
#include "jointfx/stats.hpp"
#include "jointfx/work_pool.hpp"

namespace jointfx {

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::consistency: return "consistency";
    case ExperimentKind::bias: return "bias";
    case ExperimentKind::confounding: return "confounding";
    case ExperimentKind::uncertainty: return "uncertainty";
    case ExperimentKind::counterexample: return "counterexample";
    case ExperimentKind::identify2_check: return "identify2-check";
  }
  return "unknown";
}

ExperimentKind parse_experiment_kind(const std::string& name) {
  if (name == "consistency") return ExperimentKind::consistency;
  if (name == "bias") return ExperimentKind::bias;
  if (name == "confounding") return ExperimentKind::confounding;
  if (name == "uncertainty") return ExperimentKind::uncertainty;
  if (name == "counterexample") return ExperimentKind::counterexample;
  if (name == "identify2-check" || name == "identify2_check") return ExperimentKind::identify2_check;
  throw StructuralError("unknown experiment kind: " + name);
}

ExperimentConfig ExperimentConfig::defaults(ExperimentKind kind) {
  ExperimentConfig c;
  c.kind = kind;
  switch (kind) {
    case ExperimentKind::consistency:
      c.sample_sizes = {100, 400, 1600, 6400, 25600};
      c.confounding_levels = {0.65};
      c.replications = 50;
      c.test_points = 100000;
      break;
    case ExperimentKind::bias:
      c.sample_sizes = {1600};
      c.confounding_levels = {0.65};
      c.replications = 50;
      c.test_points = 1;
      break;
    case ExperimentKind::confounding:
      c.sample_sizes = {1600};
      c.confounding_levels = {0.1, 0.35, 0.65, 0.8};
      c.replications = 20;
      c.test_points = 100000;
      break;
    case ExperimentKind::uncertainty:
      c.sample_sizes = {1600};
      c.confounding_levels = {0.65};
      c.replications = 1;
      c.test_points = 10;
      break;
    case ExperimentKind::counterexample:
      c.sample_sizes = {1};
      c.confounding_levels = {0.0};
      c.probabilities = {0.1, 0.3, 0.5, 0.7, 0.9};
      break;
    case ExperimentKind::identify2_check:
      c.sample_sizes = {10000};
      c.confounding_levels = {0.5};
      c.replications = 10;
      c.test_points = 25;
      break;
  }
  return c;
}

void ExperimentConfig::validate() const {
  if (sample_sizes.empty() || confounding_levels.empty()) {
    throw StructuralError("sample_sizes and confounding_levels must be non-empty");
  }
  for (std::size_t n : sample_sizes) {
    if (n == 0) throw StructuralError("sample sizes must be positive");
  }
  for (double c : confounding_levels) {
    if (!(c >= 0.0 && c < 1.0)) throw StructuralError("confounding levels must lie in [0, 1)");
  }
  if (replications == 0 || test_points == 0 || bootstrap_replicates < 2 || grid_points < 2) {
    throw StructuralError("replications and test_points must be positive, bootstrap_replicates and grid_points at least 2");
  }
  if (!(interval_level > 0.0 && interval_level < 1.0)) throw StructuralError("interval_level must lie in (0, 1)");
  if (kde_variables != "parents" && kde_variables != "treatments") {
    throw StructuralError("kde_variables must be \"parents\" or \"treatments\"");
  }
  if (kind == ExperimentKind::counterexample) {
    if (probabilities.empty()) throw StructuralError("probabilities must be non-empty");
    for (double p : probabilities) {
      if (!(p > 0.0 && p < 1.0)) throw StructuralError("probabilities must lie in (0, 1)");
    }
  }
}

json experiment_config_to_json(const ExperimentConfig& config) {
  json doc;
  doc["kind"] = to_string(config.kind);
  doc["sample_sizes"] = config.sample_sizes;
  doc["confounding_levels"] = config.confounding_levels;
  doc["replications"] = config.replications;
  doc["test_points"] = config.test_points;
  doc["seed"] = config.seed;
  doc["output_dir"] = config.output_dir;
  doc["bootstrap_replicates"] = config.bootstrap_replicates;
  doc["interval_level"] = config.interval_level;
  doc["probabilities"] = config.probabilities;
  doc["grid_points"] = config.grid_points;
  doc["kde_variables"] = config.kde_variables;
  doc["fit"] = fit_config_to_json(config.fit);
  return doc;
}

ExperimentConfig experiment_config_from_json(const json& doc, std::optional<ExperimentKind> kind) {
  if (!doc.is_object()) throw StructuralError("experiment config must be a JSON object");
  static const std::set<std::string> known{
      "kind",        "sample_sizes",         "confounding_levels", "replications", "test_points",
      "seed",        "output_dir",           "bootstrap_replicates", "interval_level", "probabilities",
      "grid_points", "kde_variables",        "fit"};
  for (const auto& [key, value] : doc.items()) {
    if (!known.contains(key)) throw StructuralError("unknown experiment config key: " + key);
  }
  ExperimentKind resolved = kind.value_or(ExperimentKind::consistency);
  if (doc.contains("kind")) {
    const ExperimentKind stated = parse_experiment_kind(doc.at("kind").get<std::string>());
    if (kind && *kind != stated) {
      throw StructuralError("config kind \"" + to_string(stated) + "\" does not match requested \"" +
                            to_string(*kind) + "\"");
    }
    resolved = stated;
  } else if (!kind) {
    throw StructuralError("experiment config needs a \"kind\"");
  }
  ExperimentConfig c = ExperimentConfig::defaults(resolved);
  try {
    if (doc.contains("sample_sizes")) c.sample_sizes = doc.at("sample_sizes").get<std::vector<std::size_t>>();
    if (doc.contains("confounding_levels")) {
      c.confounding_levels = doc.at("confounding_levels").get<std::vector<double>>();
    }
    if (doc.contains("probabilities")) c.probabilities = doc.at("probabilities").get<std::vector<double>>();
    c.replications = doc.value("replications", c.replications);
    c.test_points = doc.value("test_points", c.test_points);
    c.seed = doc.value("seed", c.seed);
    c.output_dir = doc.value("output_dir", c.output_dir);
    c.bootstrap_replicates = doc.value("bootstrap_replicates", c.bootstrap_replicates);
    c.interval_level = doc.value("interval_level", c.interval_level);
    c.grid_points = doc.value("grid_points", c.grid_points);
    c.kde_variables = doc.value("kde_variables", c.kde_variables);
    if (doc.contains("fit")) c.fit = fit_config_from_json(doc.at("fit"));
  } catch (const json::exception& e) {
    throw StructuralError(std::string("invalid experiment config: ") + e.what());
  }
  c.validate();
  return c;
}

SummaryStat summarize(const std::vector<double>& values) {
  SummaryStat s;
  s.count = values.size();
  if (values.empty()) return s;
  s.mean = mean(values);
  const double half = values.size() > 1 ? 1.96 * std::sqrt(sample_variance(values) / static_cast<double>(values.size())) : 0.0;
  s.lower = s.mean - half;
  s.upper = s.mean + half;
  return s;
}

const MetricRow& MetricReport::at(double level, const std::string& method, const std::string& metric) const {
  for (const auto& r : rows) {
    if (r.level == level && r.method == method && r.metric == metric) return r;
  }
  throw std::out_of_range("no metric row for " + method + "/" + metric + " at " + format_number(level));
}

double BiasRow::z() const {
  if (se > 0.0) return bias / se;
  return bias == 0.0 ? 0.0 : std::copysign(INFINITY, bias);
}

bool Identify2CheckRow::agree() const { return std::abs(constructive - anm) <= 2.0 * interval.width(); }

namespace {

constexpr std::uint64_t kTruthStream = 1;
constexpr std::uint64_t kPointStream = 2;
constexpr std::uint64_t kDataStream = 3;
constexpr std::uint64_t kBootstrapStream = 4;

std::uint64_t replication_seed(std::uint64_t root, std::size_t level_index, std::size_t replication) {
  return derive_seed(derive_seed(derive_seed(root, kDataStream), level_index), replication);
}

/// Evaluates an outcome equation at rows of treatment-valued points.
std::vector<double> predict_points(const PolynomialEquation& eq, const CausalGraph& graph,
                                   const Eigen::MatrixXd& points) {
  Eigen::MatrixXd parent_cols(points.rows(), static_cast<Eigen::Index>(eq.parents().size()));
  for (std::size_t i = 0; i < eq.parents().size(); ++i) {
    parent_cols.col(static_cast<Eigen::Index>(i)) = points.col(static_cast<Eigen::Index>(graph.index_of(eq.parents()[i])));
  }
  const Eigen::VectorXd beta =
      Eigen::Map<const Eigen::VectorXd>(eq.coefficients().data(), static_cast<Eigen::Index>(eq.size()));
  const Eigen::VectorXd out = feature_matrix(parent_cols) * beta;
  return {out.data(), out.data() + out.size()};
}

double coefficient_mae(const PolynomialEquation& a, const PolynomialEquation& b) {
  return mae(a.coefficients(), b.coefficients());
}

struct Entry {
  std::string method;
  std::string metric;
  double value;
};

/// Fits ANM and REG on one simulated suite and scores both against the truth.
std::optional<std::vector<Entry>> score_replication(const Scm& truth, std::size_t n, std::uint64_t seed,
                                                    const Eigen::MatrixXd& points,
                                                    const std::vector<double>& truth_effect,
                                                    const FitConfig& fit_config) {
  const CausalGraph& graph = truth.graph();
  const std::size_t y = graph.outcome_index();
  try {
    const auto suite = generate_regime_suite(truth, n, seed);
    const FittedAnm anm = fit(suite, graph, fit_config);
    const auto parents = graph.parent_names(y);
    const PolynomialEquation reg = fit_reg_baseline(suite, parents, fit_config);

    std::vector<Entry> out;
    const auto anm_pred = predict_points(anm.equations[y], graph, points);
    const auto reg_pred = predict_points(reg, graph, points);
    out.push_back({"ANM", "effect_mae", mae(anm_pred, truth_effect)});
    out.push_back({"REG", "effect_mae", mae(reg_pred, truth_effect)});
    if (auto s = spearman(anm_pred, truth_effect)) out.push_back({"ANM", "spearman", *s});
    if (auto s = spearman(reg_pred, truth_effect)) out.push_back({"REG", "spearman", *s});
    out.push_back({"ANM", "param_mae", coefficient_mae(anm.equations[y], truth.equation(y))});
    out.push_back({"REG", "param_mae", coefficient_mae(reg, truth.equation(y))});
    out.push_back({"ANM", "param_mae_all", parameter_mae(anm.equations, truth.equations())});
    return out;
  } catch (const NumericalError&) {
    return std::nullopt;
  }
}

void append_level(MetricReport& report, double level, const std::vector<std::optional<std::vector<Entry>>>& reps,
                  bool with_oracle) {
  std::vector<std::pair<std::string, std::string>> keys;
  std::map<std::pair<std::string, std::string>, std::vector<double>> values;
  std::size_t failures = 0;
  for (std::size_t r = 0; r < reps.size(); ++r) {
    if (!reps[r]) {
      ++failures;
      continue;
    }
    for (const auto& e : *reps[r]) {
      const auto key = std::make_pair(e.method, e.metric);
      if (!values.contains(key)) keys.push_back(key);
      values[key].push_back(e.value);
      report.replications.push_back({level, r, e.method, e.metric, e.value});
    }
  }
  for (const auto& key : keys) report.rows.push_back({level, key.first, key.second, summarize(values[key])});
  if (with_oracle) {
    // Ground-truth parameters reproduce the joint effect exactly.
    const std::size_t ok = reps.size() - failures;
    report.rows.push_back({level, "ORACLE", "effect_mae", {0.0, 0.0, 0.0, ok}});
    report.rows.push_back({level, "ORACLE", "spearman", {1.0, 1.0, 1.0, ok}});
  }
  report.failures.emplace_back(level, failures);
}

Scm consistency_truth(const ExperimentConfig& config, double c) {
  return build_synthetic_k3(default_k3_coefficients(),
                            random_correlation_matrix(4, c, derive_seed(config.seed, kTruthStream)),
                            derive_seed(config.seed, kTruthStream));
}

}  // namespace

MetricReport run_consistency(const ExperimentConfig& config) {
  config.validate();
  MetricReport report;
  report.condition = "n";
  report.truth = consistency_truth(config, config.confounding_levels.front());
  const Eigen::MatrixXd points =
      uniform_test_points(report.truth, config.test_points, derive_seed(config.seed, kPointStream));
  const auto truth_effect = predict_points(report.truth.equation(report.truth.graph().outcome_index()),
                                           report.truth.graph(), points);
  for (std::size_t i = 0; i < config.sample_sizes.size(); ++i) {
    const std::size_t n = config.sample_sizes[i];
    const auto reps = parallel_map<std::optional<std::vector<Entry>>>(config.replications, [&](std::size_t r) {
      return score_replication(report.truth, n, replication_seed(config.seed, i, r), points, truth_effect,
                               config.fit);
    });
    append_level(report, static_cast<double>(n), reps, false);
  }
  return report;
}

MetricReport run_confounding(const ExperimentConfig& config) {
  config.validate();
  MetricReport report;
  report.condition = "c";
  const std::size_t n = config.sample_sizes.front();
  for (std::size_t i = 0; i < config.confounding_levels.size(); ++i) {
    const double c = config.confounding_levels[i];
    const Scm truth = build_semisynthetic_10(derive_seed(config.seed, kTruthStream), c);
    if (i == 0) report.truth = truth;
    const Eigen::MatrixXd points =
        uniform_test_points(truth, config.test_points, derive_seed(config.seed, kPointStream));
    const auto truth_effect =
        predict_points(truth.equation(truth.graph().outcome_index()), truth.graph(), points);
    const auto reps = parallel_map<std::optional<std::vector<Entry>>>(config.replications, [&](std::size_t r) {
      return score_replication(truth, n, replication_seed(config.seed, i, r), points, truth_effect, config.fit);
    });
    append_level(report, c, reps, true);
  }
  return report;
}

BiasTable run_bias(const ExperimentConfig& config) {
  config.validate();
  BiasTable table;
  table.n = config.sample_sizes.front();
  table.c = config.confounding_levels.front();
  table.truth = consistency_truth(config, table.c);
  const CausalGraph& graph = table.truth.graph();
  const std::size_t y = graph.outcome_index();
  const auto y_parents = graph.parent_names(y);

  using Draw = std::optional<std::pair<Eigen::VectorXd, std::vector<double>>>;
  const auto draws = parallel_map<Draw>(config.replications, [&](std::size_t r) -> Draw {
    try {
      const auto suite = generate_regime_suite(table.truth, table.n, replication_seed(config.seed, 0, r));
      const FittedAnm anm = fit(suite, graph, config.fit);
      const PolynomialEquation reg = fit_reg_baseline(suite, y_parents, config.fit);
      return std::make_pair(flatten(anm.equations), reg.coefficients());
    } catch (const NumericalError&) {
      return std::nullopt;
    }
  });

  std::vector<Eigen::VectorXd> anm;
  std::vector<std::vector<double>> reg;
  for (const auto& d : draws) {
    if (!d) {
      ++table.failures;
      continue;
    }
    anm.push_back(d->first);
    reg.push_back(d->second);
  }
  auto add_row = [&](const std::string& method, const PolynomialEquation& eq, std::size_t term,
                     const std::vector<double>& samples) {
    BiasRow row;
    row.method = method;
    row.equation = eq.child();
    row.term = eq.term_names()[term];
    row.truth = eq.coefficients()[term];
    row.count = samples.size();
    if (!samples.empty()) {
      row.mean = mean(samples);
      row.bias = row.mean - row.truth;
      row.se = samples.size() > 1 ? std::sqrt(sample_variance(samples) / static_cast<double>(samples.size())) : 0.0;
    }
    table.rows.push_back(std::move(row));
  };
  std::size_t offset = 0;
  for (const auto& eq : table.truth.equations()) {
    for (std::size_t t = 0; t < eq.size(); ++t) {
      std::vector<double> samples;
      for (const auto& theta : anm) samples.push_back(theta[static_cast<Eigen::Index>(offset + t)]);
      add_row("ANM", eq, t, samples);
    }
    offset += eq.size();
  }
  const auto& y_eq = table.truth.equation(y);
  for (std::size_t t = 0; t < y_eq.size(); ++t) {
    std::vector<double> samples;
    for (const auto& coef : reg) samples.push_back(coef[t]);
    add_row("REG", y_eq, t, samples);
  }
  return table;
}

UncertaintyResult run_uncertainty(const ExperimentConfig& config) {
  config.validate();
  UncertaintyResult result;
  result.truth_scm = build_semisynthetic_10(derive_seed(config.seed, kTruthStream), config.confounding_levels.front());
  const Scm& truth = result.truth_scm;
  const CausalGraph& graph = truth.graph();
  const std::size_t y = graph.outcome_index();
  const auto suite = generate_regime_suite(truth, config.sample_sizes.front(), derive_seed(config.seed, kDataStream));
  result.points = uniform_test_points(truth, config.test_points, derive_seed(config.seed, kPointStream));
  result.truth = predict_points(truth.equation(y), graph, result.points);
  const FittedAnm model = fit(suite, graph, config.fit);
  result.prediction = predict_points(model.equations[y], graph, result.points);

  BootstrapOptions options;
  options.level = config.interval_level;
  options.fit = config.fit;
  const BootstrapResult boot = bootstrap_intervals(suite, graph, result.points, config.bootstrap_replicates,
                                                   derive_seed(config.seed, kBootstrapStream), options);
  result.intervals = boot.intervals;
  result.failures = boot.failures;

  std::vector<std::size_t> columns;
  if (config.kde_variables == "parents") {
    columns = graph.parents_of(y);
  } else {
    for (std::size_t k = 0; k < graph.treatment_count(); ++k) columns.push_back(k);
  }
  Eigen::MatrixXd sample(suite.front().values.rows(), static_cast<Eigen::Index>(columns.size()));
  Eigen::MatrixXd query(result.points.rows(), static_cast<Eigen::Index>(columns.size()));
  for (std::size_t j = 0; j < columns.size(); ++j) {
    sample.col(static_cast<Eigen::Index>(j)) = suite.front().values.col(static_cast<Eigen::Index>(columns[j]));
    query.col(static_cast<Eigen::Index>(j)) = result.points.col(static_cast<Eigen::Index>(columns[j]));
  }
  result.kde_ranks = kde_rank(sample, query);

  std::vector<double> widths, ranks;
  for (std::size_t i = 0; i < result.intervals.size(); ++i) {
    widths.push_back(result.intervals[i].width());
    ranks.push_back(static_cast<double>(result.kde_ranks[i]));
  }
  if (widths.size() >= 2) result.width_rank_spearman = spearman(widths, ranks);
  return result;
}

Scm identify2_check_scm(double c, std::uint64_t seed) {
  return build_synthetic_k2({0.0, 0.8}, {0.5, 1.0, -0.7, 0.4}, random_correlation_matrix(3, c, seed));
}

Identify2Check run_identify2_check(const ExperimentConfig& config) {
  config.validate();
  Identify2Check check;
  check.truth = identify2_check_scm(config.confounding_levels.front(), derive_seed(config.seed, kTruthStream));
  check.true_sigma_y1 = check.truth.noise_cov()(2, 0);
  check.true_sigma_y2 = check.truth.noise_cov()(2, 1);
  const CausalGraph& graph = check.truth.graph();
  const std::size_t n = config.sample_sizes.front();
  const std::size_t g = config.grid_points;

  struct Replication {
    std::vector<Identify2CheckRow> rows;
    Identify2SigmaRow sigma;
  };
  const auto reps = parallel_map<std::optional<Replication>>(config.replications, [&](std::size_t r) -> std::optional<Replication> {
    const std::uint64_t seed = replication_seed(config.seed, 0, r);
    try {
      const auto suite = generate_regime_suite(check.truth, n, seed);
      const Identify2Result id = identify2(suite);
      const FittedAnm anm = fit(suite, graph, config.fit);

      const RegimeDataset& obs = suite.front();
      const auto x1_col = obs.column("X1");
      const auto x2_col = obs.column("X2");
      const std::vector<double> x1v(x1_col.data(), x1_col.data() + x1_col.size());
      const std::vector<double> x2v(x2_col.data(), x2_col.data() + x2_col.size());
      const double lo1 = quantile(x1v, 0.05), hi1 = quantile(x1v, 0.95);
      const double lo2 = quantile(x2v, 0.05), hi2 = quantile(x2v, 0.95);
      Eigen::MatrixXd grid(static_cast<Eigen::Index>(g * g), 2);
      for (std::size_t a = 0; a < g; ++a) {
        for (std::size_t b = 0; b < g; ++b) {
          const auto row = static_cast<Eigen::Index>(a * g + b);
          grid(row, 0) = lo1 + (hi1 - lo1) * static_cast<double>(a) / static_cast<double>(g - 1);
          grid(row, 1) = lo2 + (hi2 - lo2) * static_cast<double>(b) / static_cast<double>(g - 1);
        }
      }
      BootstrapOptions options;
      options.level = config.interval_level;
      options.fit = config.fit;
      const BootstrapResult boot = bootstrap_intervals(suite, graph, grid, config.bootstrap_replicates,
                                                       derive_seed(seed, kBootstrapStream), options);
      Replication out;
      out.sigma = {r, id.cross.sigma_y1, id.cross.sigma_y2};
      for (Eigen::Index i = 0; i < grid.rows(); ++i) {
        const double x[2] = {grid(i, 0), grid(i, 1)};
        Identify2CheckRow row;
        row.replication = r;
        row.x1 = x[0];
        row.x2 = x[1];
        row.truth = joint_effect_oracle(check.truth, x);
        row.constructive = id.surface(x[0], x[1]);
        row.anm = predict_joint_effect(anm, x);
        row.interval = boot.intervals[static_cast<std::size_t>(i)];
        out.rows.push_back(row);
      }
      return out;
    } catch (const NumericalError&) {
      return std::nullopt;
    }
  });
  for (const auto& rep : reps) {
    if (!rep) {
      ++check.failures;
      continue;
    }
    check.rows.insert(check.rows.end(), rep->rows.begin(), rep->rows.end());
    check.sigmas.push_back(rep->sigma);
  }
  return check;
}

std::vector<UnidentifiabilityReport> run_counterexample(const ExperimentConfig& config) {
  config.validate();
  std::vector<UnidentifiabilityReport> reports;
  for (double p : config.probabilities) reports.push_back(verify_unidentifiability(p));
  return reports;
}

namespace {

std::string csv_preamble() { return std::string("# manifest: ") + kManifestName + "\n"; }

std::string join(const std::vector<std::string>& cells) {
  std::string out;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out += ',';
    out += cells[i];
  }
  return out + "\n";
}

std::string num(double v) { return format_number(v); }
std::string num(std::size_t v) { return std::to_string(v); }

void render_metric_report(const MetricReport& report, const std::string& stem, OutputFiles& files) {
  std::string summary = csv_preamble() + join({report.condition, "method", "metric", "mean", "ci_lower", "ci_upper", "count"});
  for (const auto& r : report.rows) {
    summary += join({num(r.level), r.method, r.metric, num(r.stat.mean), num(r.stat.lower), num(r.stat.upper),
                     num(r.stat.count)});
  }
  files[stem + ".csv"] = summary;

  std::string raw = csv_preamble() + join({report.condition, "replication", "method", "metric", "value"});
  for (const auto& v : report.replications) {
    raw += join({num(v.level), num(v.replication), v.method, v.metric, num(v.value)});
  }
  files[stem + "_replications.csv"] = raw;

  std::string failures = csv_preamble() + join({report.condition, "failed_replications"});
  for (const auto& [level, count] : report.failures) failures += join({num(level), num(count)});
  files[stem + "_failures.csv"] = failures;
  files["truth_scm.json"] = dump_json(scm_to_json(report.truth));
}

}  // namespace

OutputFiles run_experiment(const ExperimentConfig& config) {
  OutputFiles files;
  switch (config.kind) {
    case ExperimentKind::consistency:
      render_metric_report(run_consistency(config), "consistency", files);
      break;
    case ExperimentKind::confounding:
      render_metric_report(run_confounding(config), "confounding", files);
      break;
    case ExperimentKind::bias: {
      const BiasTable table = run_bias(config);
      std::string csv = csv_preamble() + join({"method", "equation", "term", "truth", "mean", "bias", "se", "z", "count"});
      for (const auto& r : table.rows) {
        csv += join({r.method, r.equation, r.term, num(r.truth), num(r.mean), num(r.bias), num(r.se), num(r.z()),
                     num(r.count)});
      }
      files["bias.csv"] = csv;
      files["truth_scm.json"] = dump_json(scm_to_json(table.truth));
      break;
    }
    case ExperimentKind::uncertainty: {
      const UncertaintyResult result = run_uncertainty(config);
      std::vector<std::string> header{"point"};
      const auto& nodes = result.truth_scm.graph().nodes();
      for (Eigen::Index k = 0; k < result.points.cols(); ++k) header.push_back(nodes[static_cast<std::size_t>(k)]);
      for (const char* h : {"truth", "prediction", "lower", "upper", "width", "kde_rank"}) header.emplace_back(h);
      std::string csv = csv_preamble() + join(header);
      for (std::size_t i = 0; i < result.truth.size(); ++i) {
        std::vector<std::string> row{num(i)};
        for (Eigen::Index k = 0; k < result.points.cols(); ++k) row.push_back(num(result.points(static_cast<Eigen::Index>(i), k)));
        row.push_back(num(result.truth[i]));
        row.push_back(num(result.prediction[i]));
        row.push_back(num(result.intervals[i].lower));
        row.push_back(num(result.intervals[i].upper));
        row.push_back(num(result.intervals[i].width()));
        row.push_back(num(result.kde_ranks[i]));
        csv += join(row);
      }
      files["uncertainty.csv"] = csv;
      files["uncertainty_summary.csv"] =
          csv_preamble() + join({"width_kde_rank_spearman", "bootstrap_failures"}) +
          join({result.width_rank_spearman ? num(*result.width_rank_spearman) : "nan", num(result.failures)});
      files["truth_scm.json"] = dump_json(scm_to_json(result.truth_scm));
      break;
    }
    case ExperimentKind::counterexample: {
      std::ostringstream csv, text;
      csv << csv_preamble();
      bool first = true;
      for (const auto& report : run_counterexample(config)) {
        std::ostringstream one;
        write_report_csv(one, report);
        std::string body = one.str();
        if (!first) body = body.substr(body.find('\n') + 1);
        csv << body;
        print_report(text, report);
        first = false;
      }
      files["counterexample.csv"] = csv.str();
      files["counterexample.txt"] = text.str();
      break;
    }
    case ExperimentKind::identify2_check: {
      const Identify2Check check = run_identify2_check(config);
      std::string csv = csv_preamble() + join({"replication", "X1", "X2", "truth", "constructive", "anm", "lower",
                                               "upper", "width", "abs_difference", "agree"});
      for (const auto& r : check.rows) {
        csv += join({num(r.replication), num(r.x1), num(r.x2), num(r.truth), num(r.constructive), num(r.anm),
                     num(r.interval.lower), num(r.interval.upper), num(r.interval.width()),
                     num(std::abs(r.constructive - r.anm)), r.agree() ? "1" : "0"});
      }
      files["identify2_check.csv"] = csv;
      std::string sig = csv_preamble() + join({"replication", "sigma_y1", "sigma_y2", "true_sigma_y1", "true_sigma_y2"});
      for (const auto& s : check.sigmas) {
        sig += join({num(s.replication), num(s.sigma_y1), num(s.sigma_y2), num(check.true_sigma_y1),
                     num(check.true_sigma_y2)});
      }
      files["identify2_sigma.csv"] = sig;
      files["identify2_failures.csv"] = csv_preamble() + join({"failed_replications"}) + join({num(check.failures)});
      files["truth_scm.json"] = dump_json(scm_to_json(check.truth));
      break;
    }
  }
  return files;
}

}  // namespace jointfx
