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

#include <sstream>

#include <gtest/gtest.h>

#include "jointfx/errors.hpp"
#include "jointfx/simgen.hpp"
#include "test_support.hpp"

namespace jointfx {
namespace {

TEST(FormatNumber, ShortestRoundTrip) {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 1e21, 123456789.125}) {
    EXPECT_EQ(std::stod(format_number(v)), v);
  }
  EXPECT_EQ(format_number(0.5), "0.5");
}

TEST(ScmJson, RoundTrip) {
  Eigen::Matrix3d sigma = Eigen::Matrix3d::Identity();
  sigma(0, 2) = sigma(2, 0) = 1.0 / 3.0;
  const Scm scm = testing_support::k2_scm({0.1, 0.8}, {0.5, 1.0, -0.7, 0.4}, sigma);
  const Scm back = scm_from_json(json::parse(dump_json(scm_to_json(scm))));
  EXPECT_EQ(back, scm);
  const Scm cut = apply_do(scm, {{"X1", 2.0}});
  EXPECT_EQ(scm_from_json(json::parse(dump_json(scm_to_json(cut)))), cut);
}

TEST(ScmJson, FieldNames) {
  const Scm scm = testing_support::k2_scm({0.1, 0.8}, {0.5, 1.0, -0.7, 0.4}, Eigen::Matrix3d::Identity());
  const json doc = scm_to_json(scm);
  for (const char* key : {"nodes", "directed_edges", "bidirected_edges", "equations", "noise_cov"}) {
    EXPECT_TRUE(doc.contains(key)) << key;
  }
}

TEST(ScmJson, MalformedDocumentThrows) {
  EXPECT_THROW(scm_from_json(json::parse(R"({"nodes": ["X1", "Y"]})")), StructuralError);
}

TEST(RegimeCsv, RoundTripKeepsRegimesAndValues) {
  const Scm scm = build_synthetic_k3(default_k3_coefficients(), Eigen::Matrix4d::Identity(), 1);
  const auto suite = generate_regime_suite(scm, 25, 4);
  std::stringstream buffer;
  write_regime_csv(buffer, suite, "manifest: run_manifest.json");
  const std::string text = buffer.str();
  EXPECT_EQ(text.rfind("# manifest: run_manifest.json\nregime,level_target,level_value,X1,X2,X3,Y\n", 0), 0u);
  const auto back = read_regime_csv(buffer);
  ASSERT_EQ(back.size(), suite.size());
  for (std::size_t i = 0; i < suite.size(); ++i) {
    EXPECT_EQ(back[i].regime, suite[i].regime);
    EXPECT_EQ(back[i].columns, suite[i].columns);
    EXPECT_EQ(back[i].values, suite[i].values);
  }
}

TEST(RegimeCsv, RejectsInconsistentRows) {
  std::istringstream mismatch("regime,level_target,level_value,X1,Y\ndo:X1,X1,1.0,2.0,0.5\n");
  EXPECT_THROW(read_regime_csv(mismatch), StructuralError);
  std::istringstream bad_label("regime,level_target,level_value,X1,Y\nsometimes,,,2.0,0.5\n");
  EXPECT_THROW(read_regime_csv(bad_label), StructuralError);
  std::istringstream obs_level("regime,level_target,level_value,X1,Y\nobs,X1,1,2.0,0.5\n");
  EXPECT_THROW(read_regime_csv(obs_level), StructuralError);
  std::istringstream short_row("regime,level_target,level_value,X1,Y\nobs,,,2.0\n");
  EXPECT_THROW(read_regime_csv(short_row), StructuralError);
  std::istringstream bad_header("label,X1,Y\n");
  EXPECT_THROW(read_regime_csv(bad_header), StructuralError);
}

TEST(RegimeCsv, SkipsCommentLines) {
  std::istringstream in("# manifest: run_manifest.json\nregime,level_target,level_value,X1,Y\nobs,,,1,2\n");
  const auto data = read_regime_csv(in);
  ASSERT_EQ(data.size(), 1u);
  EXPECT_TRUE(data[0].regime.is_observational());
  EXPECT_EQ(data[0].values(0, 1), 2.0);
}

TEST(MatrixCsv, RoundTrip) {
  Eigen::MatrixXd m(2, 3);
  m << 1.0, -2.5, 1.0 / 7.0, 0.0, 3e-12, 4.0;
  std::stringstream buffer;
  write_matrix_csv(buffer, {"a", "b", "c"}, m, "note");
  std::vector<std::string> header;
  EXPECT_EQ(read_matrix_csv(buffer, &header), m);
  EXPECT_EQ(header, (std::vector<std::string>{"a", "b", "c"}));
}

}  // namespace
}  // namespace jointfx
