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

// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "jointfx/cli.hpp"
#include "jointfx/counterexample.hpp"
#include "jointfx/estimator.hpp"
#include "jointfx/experiments.hpp"
#include "jointfx/identify2.hpp"
#include "jointfx/io.hpp"
#include "jointfx/rng.hpp"
#include "jointfx/simgen.hpp"

namespace {

using namespace jointfx;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

double sd_of(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m += x;
  m /= static_cast<double>(v.size());
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

Eigen::MatrixXd random_spd(Eigen::Index d, Rng& rng) {
  Eigen::MatrixXd a(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) a(i, j) = rng.normal();
  }
  return a * a.transpose() / static_cast<double>(d) + 0.3 * Eigen::MatrixXd::Identity(d, d);
}

Scm confounded_k3(std::uint64_t seed) {
  return build_synthetic_k3(default_k3_coefficients(), random_correlation_matrix(4, 0.65, seed), seed);
}

Outcome counterexample_exactness() {
  double worst_gap = 0.0;
  for (double p : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    const double q = 1.0 - p;
    const DiscreteScm conj(DiscreteScm::Variant::conjunctive, p);
    const DiscreteScm coll(DiscreteScm::Variant::collapsed, p);
    for (const auto* scm : {&conj, &coll}) {
      // Observational table over (X1, X2, Y).
      const auto obs = enumerate_distribution(*scm, Regime::observational());
      for (const auto& e : obs.entries) {
        const bool all0 = e.values == std::vector<int>{0, 0, 0};
        const bool all1 = e.values == std::vector<int>{1, 1, 1};
        worst_gap = std::max(worst_gap, std::abs(e.probability - (all0 ? q : all1 ? p : 0.0)));
      }
      // do(X1 = v) over (X2, Y) and do(X2 = v) over (X1, Y).
      const auto d10 = enumerate_distribution(*scm, Regime::single(0, 0.0));
      const auto d11 = enumerate_distribution(*scm, Regime::single(0, 1.0));
      const auto d20 = enumerate_distribution(*scm, Regime::single(1, 0.0));
      const auto d21 = enumerate_distribution(*scm, Regime::single(1, 1.0));
      for (const auto& e : d10.entries) {
        worst_gap = std::max(worst_gap, std::abs(e.probability - (e.values == std::vector<int>{0, 0} ? 1.0 : 0.0)));
      }
      for (const auto* t : {&d11, &d21}) {
        for (const auto& e : t->entries) {
          const double want = e.values == std::vector<int>{0, 0} ? q : e.values == std::vector<int>{1, 1} ? p : 0.0;
          worst_gap = std::max(worst_gap, std::abs(e.probability - want));
        }
      }
      for (const auto& e : d20.entries) {
        const double want = e.values == std::vector<int>{0, 0} ? q : e.values == std::vector<int>{1, 0} ? p : 0.0;
        worst_gap = std::max(worst_gap, std::abs(e.probability - want));
      }
    }
    const auto report = verify_unidentifiability(p);
    if (!report.shared_regimes_agree) return {false, "shared regimes differ at p=" + fmt(p)};
    worst_gap = std::max(worst_gap, std::abs(report.joint_tv_distance - p));
  }
  return {worst_gap <= 1e-15, "max table/TV deviation " + fmt(worst_gap)};
}

Outcome gaussian_conditioning() {
  int ok = 0;
  double worst_z = 0.0;
  for (std::uint64_t instance = 0; instance < 10; ++instance) {
    const Eigen::MatrixXd sigma = random_correlation_matrix(3, 0.6, derive_seed(2, instance));
    Rng rng(derive_seed(3, instance));
    const Eigen::Vector2d u_x(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
    const Eigen::MatrixXd chol = sigma.llt().matrixL();
    std::vector<double> hits;
    for (int i = 0; i < 1000000; ++i) {
      const Eigen::Vector3d u = chol * Eigen::Vector3d(rng.normal(), rng.normal(), rng.normal());
      if (std::abs(u[0] - u_x[0]) < 0.05 && std::abs(u[1] - u_x[1]) < 0.05) hits.push_back(u[2]);
    }
    double mean = 0.0;
    for (double h : hits) mean += h;
    mean /= static_cast<double>(hits.size());
    const double se = sd_of(hits) / std::sqrt(static_cast<double>(hits.size()));
    NoiseGeometry g;
    g.sigma_ux = sigma.topLeftCorner(2, 2);
    g.sigma_uy = sigma.block(2, 0, 1, 2);
    const double z = std::abs(conditional_noise_mean(g, u_x) - mean) / se;
    worst_z = std::max(worst_z, z);
    if (z <= 3.0) ++ok;
  }
  return {ok == 10, std::to_string(ok) + "/10 within 3 SE, worst " + fmt(worst_z) + " SE"};
}

Outcome gradient_correctness() {
  Rng rng(41);
  double worst = 0.0;
  for (std::uint64_t instance = 0; instance < 20; ++instance) {
    const Scm scm = confounded_k3(100 + instance);
    const auto suite = generate_regime_suite(scm, 15, 200 + instance);
    Eigen::VectorXd theta = flatten(scm.equations());
    for (Eigen::Index i = 0; i < theta.size(); ++i) theta[i] += 0.3 * rng.normal();
    const auto eqs = unflatten(scm.equations(), theta);
    NoiseCovarianceSet covs = NoiseCovarianceSet::identity(4);
    covs.sigma0 = random_spd(4, rng);
    for (auto& s : covs.sigma_k) s = random_spd(3, rng);
    const Eigen::VectorXd grad = grad_theta(eqs, covs, suite);
    for (Eigen::Index i = 0; i < theta.size(); ++i) {
      Eigen::VectorXd up = theta, down = theta;
      up[i] += 1e-5;
      down[i] -= 1e-5;
      const double fd = (combined_log_likelihood(unflatten(eqs, up), covs, suite) -
                         combined_log_likelihood(unflatten(eqs, down), covs, suite)) /
                        2e-5;
      worst = std::max(worst, std::abs(grad[i] - fd) / std::max(1.0, std::abs(fd)));
    }
  }
  return {worst < 1e-4, "max relative error " + fmt(worst)};
}

Outcome sigma_optimality_and_ascent() {
  Rng rng(51);
  std::size_t beaten = 0, trials = 0;
  for (std::uint64_t trial = 0; trial < 20; ++trial) {
    const Scm scm = confounded_k3(300 + trial);
    const auto suite = generate_regime_suite(scm, 200, 400 + trial);
    Eigen::VectorXd theta = flatten(scm.equations());
    for (Eigen::Index i = 0; i < theta.size(); ++i) theta[i] += 0.1 * rng.normal();
    const auto eqs = unflatten(scm.equations(), theta);
    const double best = combined_log_likelihood(eqs, sigma_closed_form(eqs, suite), suite);
    for (int alt = 0; alt < 100; ++alt) {
      NoiseCovarianceSet other = NoiseCovarianceSet::identity(4);
      other.sigma0 = random_spd(4, rng);
      for (auto& s : other.sigma_k) s = random_spd(3, rng);
      ++trials;
      if (best >= combined_log_likelihood(eqs, other, suite)) ++beaten;
    }
  }
  std::size_t monotone = 0;
  for (std::uint64_t f = 0; f < 20; ++f) {
    const Scm scm = confounded_k3(500 + f);
    const FittedAnm model = fit(generate_regime_suite(scm, 400, 600 + f), scm.graph());
    bool ok = true;
    for (std::size_t i = 1; i < model.fit_trace.size(); ++i) ok = ok && model.fit_trace[i] >= model.fit_trace[i - 1] - 1e-9;
    if (ok) ++monotone;
  }
  return {beaten == trials && monotone == 20, std::to_string(beaten) + "/" + std::to_string(trials) +
                                                   " alternatives beaten, " + std::to_string(monotone) +
                                                   "/20 monotone traces"};
}

Outcome consistency() {
  ExperimentConfig config = ExperimentConfig::defaults(ExperimentKind::consistency);
  config.replications = 20;
  const MetricReport r = run_consistency(config);
  const double effect_ratio = r.at(25600, "ANM", "effect_mae").stat.mean / r.at(100, "ANM", "effect_mae").stat.mean;
  const double param_ratio = r.at(25600, "ANM", "param_mae").stat.mean / r.at(100, "ANM", "param_mae").stat.mean;
  double reg_min = INFINITY, reg_max = 0.0;
  for (std::size_t n : config.sample_sizes) {
    const double v = r.at(static_cast<double>(n), "REG", "param_mae").stat.mean;
    reg_min = std::min(reg_min, v);
    reg_max = std::max(reg_max, v);
  }
  const double reg_ratio = reg_max / reg_min;
  return {effect_ratio <= 0.25 && param_ratio <= 0.25 && reg_ratio < 2.0,
          "ANM effect MAE ratio " + fmt(effect_ratio) + ", ANM param MAE ratio " + fmt(param_ratio) +
              ", REG param MAE max/min " + fmt(reg_ratio)};
}

Outcome unbiasedness() {
  ExperimentConfig config = ExperimentConfig::defaults(ExperimentKind::bias);
  const BiasTable table = run_bias(config);
  double anm_worst = 0.0, reg_worst = 0.0;
  for (const auto& row : table.rows) {
    (row.method == "ANM" ? anm_worst : reg_worst) = std::max(row.method == "ANM" ? anm_worst : reg_worst, std::abs(row.z()));
  }
  return {anm_worst < 3.0 && reg_worst > 3.0 && table.failures == 0,
          "max |bias|/SE: ANM " + fmt(anm_worst) + ", REG " + fmt(reg_worst) + " over " +
              std::to_string(config.replications) + " fits"};
}

Outcome confounding_sweep() {
  const ExperimentConfig config = ExperimentConfig::defaults(ExperimentKind::confounding);
  const MetricReport r = run_confounding(config);
  double lo = INFINITY, hi = 0.0;
  bool spearman_ok = true;
  for (double c : config.confounding_levels) {
    const double anm = r.at(c, "ANM", "effect_mae").stat.mean;
    lo = std::min(lo, anm);
    hi = std::max(hi, anm);
    if (c >= 0.35 && r.at(c, "ANM", "spearman").stat.mean < r.at(c, "REG", "spearman").stat.mean) spearman_ok = false;
  }
  const double reg_low = r.at(0.1, "REG", "effect_mae").stat.mean;
  const double reg_high = r.at(0.8, "REG", "effect_mae").stat.mean;
  std::ostringstream d;
  d << "ANM MAE max/min " << fmt(hi / lo) << ", REG MAE " << fmt(reg_low) << " -> " << fmt(reg_high)
    << ", ANM Spearman >= REG for c >= 0.35: " << (spearman_ok ? "yes" : "no");
  return {hi / lo < 1.5 && reg_high > reg_low && spearman_ok, d.str()};
}

Outcome cross_estimator_agreement() {
  const ExperimentConfig config = ExperimentConfig::defaults(ExperimentKind::identify2_check);
  const Identify2Check check = run_identify2_check(config);
  std::size_t agree = 0;
  for (const auto& row : check.rows) agree += row.agree() ? 1 : 0;
  const std::size_t expected = config.replications * config.grid_points * config.grid_points;
  return {check.failures == 0 && check.rows.size() == expected && agree == expected,
          std::to_string(agree) + "/" + std::to_string(expected) + " grid points agree, " +
              std::to_string(check.failures) + " failed seeds"};
}

Outcome uncertainty_ordering() {
  const ExperimentConfig config = ExperimentConfig::defaults(ExperimentKind::uncertainty);
  const UncertaintyResult result = run_uncertainty(config);
  const double rho = result.width_rank_spearman.value_or(NAN);
  return {rho > 0.5, "Spearman(width, KDE rank) = " + fmt(rho) + " over " + std::to_string(config.test_points) +
                         " points, b = " + std::to_string(config.bootstrap_replicates)};
}

Outcome determinism() {
  namespace fs = std::filesystem;
  const fs::path root = fs::temp_directory_path() / "jointfx_acceptance_determinism";
  fs::remove_all(root);
  const std::vector<std::pair<std::string, std::string>> configs{
      {"consistency", R"({"kind":"consistency","sample_sizes":[100,400],"replications":3,"test_points":200})"},
      {"bias", R"({"kind":"bias","sample_sizes":[200],"replications":3})"},
      {"confounding", R"({"kind":"confounding","sample_sizes":[200],"confounding_levels":[0.1,0.8],"replications":2,"test_points":200})"},
      {"uncertainty", R"({"kind":"uncertainty","sample_sizes":[300],"test_points":5,"bootstrap_replicates":6})"},
      {"counterexample", R"({"kind":"counterexample"})"},
      {"identify2-check", R"({"kind":"identify2-check","sample_sizes":[2000],"replications":2,"bootstrap_replicates":6})"}};
  std::size_t compared = 0;
  for (const auto& [kind, text] : configs) {
    std::vector<std::map<std::string, std::string>> runs;
    for (const char* attempt : {"a", "b"}) {
      const fs::path dir = root / kind / attempt;
      fs::create_directories(dir);
      const std::string config_path = (root / kind / "config.json").string();
      write_text_file(config_path, text);
      const std::string out = dir.string();
      const char* argv[] = {"jointfx", "--seed", "7", "--out", out.c_str(), "--config", config_path.c_str(),
                            "experiment", kind.c_str()};
      std::ostringstream so, se;
      if (cli_dispatch(9, argv, so, se) != 0) return {false, kind + " failed: " + se.str()};
      std::map<std::string, std::string> files;
      for (const auto& entry : fs::directory_iterator(dir)) {
        files[entry.path().filename().string()] = read_text_file(entry.path().string());
      }
      runs.push_back(std::move(files));
    }
    if (runs[0] != runs[1]) return {false, kind + " outputs differ between runs"};
    compared += runs[0].size();
  }
  fs::remove_all(root);
  return {true, std::to_string(compared) + " files byte-identical across re-runs of 6 experiment kinds"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"counterexample exactness", counterexample_exactness},
      {"Gaussian conditioning oracle", gaussian_conditioning},
      {"gradient correctness", gradient_correctness},
      {"covariance-step optimality and ascent", sigma_optimality_and_ascent},
      {"consistency", consistency},
      {"unbiasedness at n=1600", unbiasedness},
      {"confounding sweep", confounding_sweep},
      {"cross-estimator agreement", cross_estimator_agreement},
      {"uncertainty ordering", uncertainty_ordering},
      {"determinism", determinism},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = criteria[i].second();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!outcome.pass) ++failures;
    std::cout << (outcome.pass ? "PASS" : "FAIL") << " criterion " << (i + 1) << " (" << criteria[i].first
              << "): " << outcome.detail << " [" << fmt(seconds) << " s]" << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
