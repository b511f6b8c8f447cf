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

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "jointfx/cli.hpp"
#include "jointfx/io.hpp"
#include "jointfx/simgen.hpp"
#include "test_support.hpp"

namespace jointfx {
namespace {

namespace fs = std::filesystem;

struct Invocation {
  int code = 0;
  std::string out;
  std::string err;
};

Invocation run(std::vector<std::string> args) {
  args.insert(args.begin(), "jointfx");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli_dispatch(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("jointfx_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

TEST_F(CliTest, UsageErrorsExitOne) {
  EXPECT_EQ(run({}).code, kExitUsage);
  EXPECT_EQ(run({"bogus"}).code, kExitUsage);
  const auto missing = run({"fit", "--data", path("nope.csv")});
  EXPECT_EQ(missing.code, kExitUsage);
  EXPECT_FALSE(missing.err.empty());
  EXPECT_EQ(run({"--out", dir_.string(), "fit", "--data", path("nope.csv"), "--graph", path("nope.json")}).code,
            kExitUsage);
}

TEST_F(CliTest, CounterexamplePrintsTables) {
  const auto r = run({"--out", dir_.string(), "counterexample", "--p", "0.3", "--csv"});
  ASSERT_EQ(r.code, kExitSuccess) << r.err;
  EXPECT_NE(r.out.find("0.3"), std::string::npos);
  EXPECT_TRUE(fs::exists(path("counterexample.csv")));
  EXPECT_TRUE(fs::exists(path("run_manifest.json")));
}

TEST_F(CliTest, SimulateFitPredictIsReproducible) {
  // One output directory per run: each run writes its own run_manifest.json.
  const std::string sim = path("sim"), fitted = path("fit"), pred = path("pred");
  ASSERT_EQ(run({"--seed", "5", "--out", sim, "simulate", "--builtin", "k3", "--n", "300"}).code, kExitSuccess);
  const std::string data = sim + "/data.csv", graph = sim + "/scm.json";
  ASSERT_TRUE(fs::exists(data));
  const auto fit1 = run({"--out", fitted, "fit", "--data", data, "--graph", graph});
  ASSERT_EQ(fit1.code, kExitSuccess) << fit1.err;
  write_text_file(path("points.csv"), "X1,X2,X3\n0,0,0\n1,-1,0.5\n");
  const std::string model = fitted + "/model.json";
  ASSERT_EQ(run({"--out", pred, "predict", "--model", model, "--points", path("points.csv")}).code, kExitSuccess);
  const std::string first = read_text_file(pred + "/predictions.csv");

  const auto again = run({"--out", pred, "--verify", "predict", "--model", model, "--points", path("points.csv")});
  EXPECT_EQ(again.code, kExitSuccess) << again.err;
  EXPECT_EQ(read_text_file(pred + "/predictions.csv"), first);

  const auto refit = run({"--out", fitted, "--verify", "fit", "--data", data, "--graph", graph});
  EXPECT_EQ(refit.code, kExitSuccess) << refit.err;
  const auto resim = run({"--seed", "5", "--out", sim, "--verify", "simulate", "--builtin", "k3", "--n", "300"});
  EXPECT_EQ(resim.code, kExitSuccess) << resim.err;
}

TEST_F(CliTest, VerifyMismatchExitsThree) {
  ASSERT_EQ(run({"--out", dir_.string(), "counterexample", "--p", "0.4", "--csv"}).code, kExitSuccess);
  write_text_file(path("counterexample.csv"), "tampered\n");
  const auto r = run({"--out", dir_.string(), "--verify", "counterexample", "--p", "0.4", "--csv"});
  EXPECT_EQ(r.code, kExitVerifyMismatch);
  EXPECT_NE(r.err.find("counterexample.csv"), std::string::npos);
}

TEST_F(CliTest, ExperimentWritesReportAndManifest) {
  write_text_file(path("config.json"),
                  R"({"kind": "consistency", "sample_sizes": [100], "replications": 2, "test_points": 20})");
  const auto r = run({"--out", dir_.string(), "--config", path("config.json"), "experiment", "consistency"});
  ASSERT_EQ(r.code, kExitSuccess) << r.err;
  const std::string csv = read_text_file(path("consistency.csv"));
  EXPECT_EQ(csv.rfind("# manifest: run_manifest.json", 0), 0u);
  const json manifest = read_json_file(path("run_manifest.json"));
  EXPECT_EQ(manifest.at("subcommand"), "experiment");
  EXPECT_TRUE(manifest.contains("versions"));
  EXPECT_EQ(run({"--out", dir_.string(), "experiment", "figure7"}).code, kExitUsage);
}

TEST_F(CliTest, ConstantInterventionLevelsExitTwo) {
  const Scm scm = testing_support::k2_scm({0.0, 0.8}, {0.5, 1.0, -0.7, 0.4}, Eigen::Matrix3d::Identity());
  auto suite = generate_regime_suite(scm, 100, 1);
  const std::vector<double> constant(100, 0.25);
  suite[1] = sample_with_levels(scm, 0, constant, 2);
  std::ofstream csv(path("data.csv"));
  write_regime_csv(csv, suite);
  csv.close();
  const auto r = run({"--out", dir_.string(), "identify2", "--data", path("data.csv")});
  EXPECT_EQ(r.code, kExitNumerical);
  EXPECT_FALSE(r.err.empty());
}

}  // namespace
}  // namespace jointfx
