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

#include "jointfx/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "jointfx/counterexample.hpp"
#include "jointfx/errors.hpp"
#include "jointfx/estimator.hpp"
#include "jointfx/experiments.hpp"
#include "jointfx/identify2.hpp"
#include "jointfx/io.hpp"
#include "jointfx/model_io.hpp"
#include "jointfx/simgen.hpp"

namespace jointfx {
namespace {

namespace fs = std::filesystem;

struct GlobalOptions {
  std::uint64_t seed = 1;
  bool seed_given = false;
  std::string out = ".";
  std::string config;
  bool verify = false;
};

struct SimulateOptions {
  std::string builtin = "k3";
  std::string scm_path;
  double c = 0.65;
  std::size_t n = 1000;
  bool standardize = false;
};

struct FitOptions {
  std::string data;
  std::string graph;
};

struct PredictOptions {
  std::string model;
  std::string points;
};

struct Identify2Options {
  std::string data;
  std::size_t grid = 20;
};

struct CounterexampleOptions {
  double p = 0.5;
  bool csv = false;
};

struct ExperimentOptions {
  std::string kind;
};

/// Everything a subcommand produces: files for --out and text for stdout.
struct RunOutput {
  OutputFiles files;
  std::string stdout_text;
  json manifest_config = json::object();
};

std::string manifest_line() { return std::string("manifest: ") + kManifestName; }

std::vector<RegimeDataset> load_regime_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw StructuralError("cannot open " + path);
  return read_regime_csv(in);
}

RunOutput run_simulate(const GlobalOptions& g, const SimulateOptions& o) {
  Scm scm;
  if (!o.scm_path.empty()) {
    scm = scm_from_json(read_json_file(o.scm_path));
  } else if (o.builtin == "k3") {
    scm = build_synthetic_k3(default_k3_coefficients(), random_correlation_matrix(4, o.c, derive_seed(g.seed, 1)),
                             derive_seed(g.seed, 1));
  } else if (o.builtin == "k2") {
    scm = identify2_check_scm(o.c, derive_seed(g.seed, 1));
  } else if (o.builtin == "semi10") {
    scm = build_semisynthetic_10(derive_seed(g.seed, 1), o.c);
  } else {
    throw StructuralError("unknown builtin SCM: " + o.builtin + " (expected k3, k2 or semi10)");
  }
  auto suite = generate_regime_suite(scm, o.n, derive_seed(g.seed, 3));
  RunOutput run;
  if (o.standardize) {
    auto [scaled, transform] = standardize(suite);
    suite = std::move(scaled);
    json t;
    t["columns"] = suite.front().columns;
    t["mean"] = std::vector<double>(transform.mean.data(), transform.mean.data() + transform.mean.size());
    t["scale"] = std::vector<double>(transform.scale.data(), transform.scale.data() + transform.scale.size());
    run.files["transform.json"] = dump_json(t);
  }
  std::ostringstream csv;
  write_regime_csv(csv, suite, manifest_line());
  run.files["data.csv"] = csv.str();
  run.files["scm.json"] = dump_json(scm_to_json(scm));
  run.manifest_config = {{"builtin", o.scm_path.empty() ? o.builtin : ""},
                         {"scm", o.scm_path},
                         {"c", o.c},
                         {"n", o.n},
                         {"standardize", o.standardize}};
  return run;
}

RunOutput run_fit(const GlobalOptions& g, const FitOptions& o) {
  const json graph_doc = read_json_file(o.graph);
  const CausalGraph graph = graph_from_json(graph_doc);
  const auto data = load_regime_csv(o.data);
  FitConfig config;
  if (!g.config.empty()) config = fit_config_from_json(read_json_file(g.config));
  const FittedAnm model = fit(data, graph, config);
  RunOutput run;
  run.files["model.json"] = dump_json(model_to_json(model));
  run.stdout_text = "fit: " + std::string(model.status == FittedAnm::Status::converged ? "converged" : "max rounds reached") +
                    " after " + std::to_string(model.rounds) + " rounds, log-likelihood " +
                    format_number(model.fit_trace.empty() ? 0.0 : model.fit_trace.back()) + "\n";
  run.manifest_config = {{"data", o.data}, {"graph", o.graph}, {"fit", fit_config_to_json(config)}};
  return run;
}

RunOutput run_predict(const PredictOptions& o) {
  const FittedAnm model = model_from_json(read_json_file(o.model));
  std::ifstream in(o.points);
  if (!in) throw StructuralError("cannot open " + o.points);
  std::vector<std::string> header;
  const Eigen::MatrixXd points = read_matrix_csv(in, &header);
  const std::size_t k = model.graph.treatment_count();
  // Columns are matched by name so the file may list treatments in any order.
  std::vector<std::size_t> column_of(k);
  for (std::size_t t = 0; t < k; ++t) {
    const auto it = std::find(header.begin(), header.end(), model.graph.nodes()[t]);
    if (it == header.end()) throw StructuralError("points file lacks column " + model.graph.nodes()[t]);
    column_of[t] = static_cast<std::size_t>(it - header.begin());
  }
  Eigen::MatrixXd out(points.rows(), static_cast<Eigen::Index>(k + 1));
  std::vector<double> x(k);
  for (Eigen::Index r = 0; r < points.rows(); ++r) {
    for (std::size_t t = 0; t < k; ++t) {
      x[t] = points(r, static_cast<Eigen::Index>(column_of[t]));
      out(r, static_cast<Eigen::Index>(t)) = x[t];
    }
    out(r, static_cast<Eigen::Index>(k)) = predict_joint_effect(model, x);
  }
  std::vector<std::string> out_header(model.graph.nodes().begin(), model.graph.nodes().end() - 1);
  out_header.push_back("prediction");
  std::ostringstream csv;
  write_matrix_csv(csv, out_header, out, manifest_line());
  RunOutput run;
  run.files["predictions.csv"] = csv.str();
  run.manifest_config = {{"model", o.model}, {"points", o.points}};
  return run;
}

RunOutput run_identify2(const Identify2Options& o) {
  if (o.grid < 2) throw StructuralError("--grid must be at least 2");
  const auto data = load_regime_csv(o.data);
  const Identify2Result id = identify2(data);
  json doc;
  doc["f2"] = {{"parents", id.f2.parents()}, {"coefficients", id.f2.coefficients()}};
  doc["sigma_ux"] = matrix_to_json(id.geometry.sigma_ux);
  doc["sigma_y1"] = id.cross.sigma_y1;
  doc["sigma_y2"] = id.cross.sigma_y2;
  doc["degenerate"] = id.geometry.degenerate;
  const PolynomialEquation surface = id.surface.as_equation();
  doc["surface"] = {{"parents", surface.parents()}, {"coefficients", surface.coefficients()}};

  const RegimeDataset* obs = nullptr;
  for (const auto& d : data) {
    if (d.regime.is_observational()) obs = &d;
  }
  const Eigen::VectorXd x1 = obs->values.col(0);
  const Eigen::VectorXd x2 = obs->values.col(1);
  Eigen::MatrixXd grid(static_cast<Eigen::Index>(o.grid * o.grid), 3);
  for (std::size_t a = 0; a < o.grid; ++a) {
    for (std::size_t b = 0; b < o.grid; ++b) {
      const auto row = static_cast<Eigen::Index>(a * o.grid + b);
      const double u = static_cast<double>(a) / static_cast<double>(o.grid - 1);
      const double v = static_cast<double>(b) / static_cast<double>(o.grid - 1);
      grid(row, 0) = x1.minCoeff() + u * (x1.maxCoeff() - x1.minCoeff());
      grid(row, 1) = x2.minCoeff() + v * (x2.maxCoeff() - x2.minCoeff());
      grid(row, 2) = id.surface(grid(row, 0), grid(row, 1));
    }
  }
  std::ostringstream csv;
  write_matrix_csv(csv, {"X1", "X2", "effect"}, grid, manifest_line());
  RunOutput run;
  run.files["identify2.json"] = dump_json(doc);
  run.files["surface.csv"] = csv.str();
  run.manifest_config = {{"data", o.data}, {"grid", o.grid}};
  return run;
}

RunOutput run_counterexample_cmd(const CounterexampleOptions& o) {
  const UnidentifiabilityReport report = verify_unidentifiability(o.p);
  RunOutput run;
  std::ostringstream text;
  print_report(text, report);
  run.stdout_text = text.str();
  if (o.csv) {
    std::ostringstream csv;
    write_report_csv(csv, report, manifest_line());
    run.files["counterexample.csv"] = csv.str();
  }
  run.manifest_config = {{"p", o.p}, {"csv", o.csv}};
  return run;
}

RunOutput run_experiment_cmd(const GlobalOptions& g, const ExperimentOptions& o) {
  const ExperimentKind kind = parse_experiment_kind(o.kind);
  ExperimentConfig config = g.config.empty() ? ExperimentConfig::defaults(kind)
                                             : experiment_config_from_json(read_json_file(g.config), kind);
  if (g.seed_given) config.seed = g.seed;
  config.validate();
  RunOutput run;
  run.files = run_experiment(config);
  json cfg = experiment_config_to_json(config);
  cfg.erase("output_dir");
  run.manifest_config = cfg;
  std::string listing;
  for (const auto& [name, content] : run.files) listing += "wrote " + name + "\n";
  run.stdout_text = listing;
  return run;
}

std::string version_string(int major, int minor, int patch) {
  return std::to_string(major) + "." + std::to_string(minor) + "." + std::to_string(patch);
}

std::string render_manifest(const std::string& subcommand, std::uint64_t seed, const RunOutput& run) {
  json doc;
  doc["tool"] = "jointfx";
  doc["subcommand"] = subcommand;
  doc["seed"] = seed;
  doc["config"] = run.manifest_config;
  doc["versions"] = {
      {"jointfx", JOINTFX_VERSION},
      {"eigen", version_string(EIGEN_WORLD_VERSION, EIGEN_MAJOR_VERSION, EIGEN_MINOR_VERSION)},
      {"nlohmann_json", version_string(NLOHMANN_JSON_VERSION_MAJOR, NLOHMANN_JSON_VERSION_MINOR,
                                       NLOHMANN_JSON_VERSION_PATCH)},
      {"cli11", version_string(CLI11_VERSION_MAJOR, CLI11_VERSION_MINOR, CLI11_VERSION_PATCH)},
  };
  json outputs = json::array();
  for (const auto& [name, content] : run.files) outputs.push_back(name);
  doc["outputs"] = std::move(outputs);
  return dump_json(doc);
}

/// Compares freshly computed outputs with the files already in `dir`.
std::vector<std::string> verify_outputs(const fs::path& dir, const OutputFiles& files) {
  std::vector<std::string> mismatches;
  for (const auto& [name, content] : files) {
    const fs::path path = dir / name;
    if (!fs::exists(path)) {
      mismatches.push_back(name + " (missing)");
      continue;
    }
    if (read_text_file(path.string()) != content) mismatches.push_back(name);
  }
  return mismatches;
}

}  // namespace

int cli_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Joint causal effect estimation from single-intervention data", "jointfx"};
  app.require_subcommand(1);
  GlobalOptions g;
  app.add_option("--seed", g.seed, "Root random seed")->each([&](const std::string&) { g.seed_given = true; });
  app.add_option("--out", g.out, "Output directory")->capture_default_str();
  app.add_option("--config", g.config, "JSON config file (fit settings or experiment config)");
  app.add_flag("--verify", g.verify, "Recompute outputs and compare with the files in --out");

  SimulateOptions sim;
  auto* simulate = app.add_subcommand("simulate", "Sample an observational plus single-intervention suite");
  simulate->add_option("--builtin", sim.builtin, "Built-in SCM: k3, k2 or semi10")->capture_default_str();
  simulate->add_option("--scm", sim.scm_path, "SCM JSON file (overrides --builtin)");
  simulate->add_option("--c", sim.c, "Noise correlation bound for built-in SCMs")->capture_default_str();
  simulate->add_option("--n", sim.n, "Rows per regime")->capture_default_str();
  simulate->add_flag("--standardize", sim.standardize, "Standardize with observational moments");

  FitOptions fit_opts;
  auto* fit_cmd = app.add_subcommand("fit", "Joint maximum-likelihood fit of all structural equations");
  fit_cmd->add_option("--data", fit_opts.data, "Regime CSV")->required();
  fit_cmd->add_option("--graph", fit_opts.graph, "Graph or SCM JSON")->required();

  PredictOptions pred;
  auto* predict = app.add_subcommand("predict", "Predict joint effects from a fitted model");
  predict->add_option("--model", pred.model, "model.json from fit")->required();
  predict->add_option("--points", pred.points, "CSV of treatment levels with a header row")->required();

  Identify2Options id;
  auto* ident = app.add_subcommand("identify2", "Constructive two-treatment identification");
  ident->add_option("--data", id.data, "Regime CSV with obs, do:X1 and do:X2 rows")->required();
  ident->add_option("--grid", id.grid, "Surface grid points per axis")->capture_default_str();

  CounterexampleOptions ce;
  auto* counter = app.add_subcommand("counterexample", "Binary models that agree on every single-intervention regime");
  counter->add_option("--p", ce.p, "Probability of the shared noise bit")->capture_default_str();
  counter->add_flag("--csv", ce.csv, "Also write counterexample.csv");

  ExperimentOptions ex;
  auto* experiment = app.add_subcommand("experiment", "Run an experiment");
  experiment->add_option("kind", ex.kind,
                         "consistency | bias | confounding | uncertainty | counterexample | identify2-check")
      ->required();

  for (auto* sub : {simulate, fit_cmd, predict, ident, counter, experiment}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kExitSuccess;
    }
    err << "error: " << e.what() << "\n" << app.help();
    return kExitUsage;
  }

  std::string name;
  try {
    RunOutput run;
    if (simulate->parsed()) {
      name = "simulate";
      run = run_simulate(g, sim);
    } else if (fit_cmd->parsed()) {
      name = "fit";
      run = run_fit(g, fit_opts);
    } else if (predict->parsed()) {
      name = "predict";
      run = run_predict(pred);
    } else if (ident->parsed()) {
      name = "identify2";
      run = run_identify2(id);
    } else if (counter->parsed()) {
      name = "counterexample";
      run = run_counterexample_cmd(ce);
    } else {
      name = "experiment";
      run = run_experiment_cmd(g, ex);
    }
    if (!run.files.empty()) run.files[kManifestName] = render_manifest(name, g.seed, run);

    const fs::path dir(g.out);
    if (g.verify) {
      const auto mismatches = verify_outputs(dir, run.files);
      if (!mismatches.empty()) {
        err << "verify: " << mismatches.size() << " file(s) differ:";
        for (const auto& m : mismatches) err << ' ' << m;
        err << '\n';
        return kExitVerifyMismatch;
      }
      out << "verify: " << run.files.size() << " file(s) reproduced byte-for-byte\n";
      return kExitSuccess;
    }
    out << run.stdout_text;
    if (!run.files.empty()) {
      fs::create_directories(dir);
      for (const auto& [file, content] : run.files) write_text_file((dir / file).string(), content);
    }
    return kExitSuccess;
  } catch (const NumericalError& e) {
    err << name << ": numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << name << ": " << e.what() << '\n';
    return kExitUsage;
  }
}

}  // namespace jointfx
