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

#include "jointfx/counterexample.hpp"

#include <algorithm>
#include <sstream>

#include <gtest/gtest.h>

namespace jointfx {
namespace {

const DiscreteScm kConj(DiscreteScm::Variant::conjunctive, 0.3);
const DiscreteScm kColl(DiscreteScm::Variant::collapsed, 0.3);

TEST(Counterexample, ObservationalTable) {
  const double p = 0.3;
  for (const auto* scm : {&kConj, &kColl}) {
    const auto t = enumerate_distribution(*scm, Regime::observational());
    EXPECT_EQ(t.probability({0, 0, 0}), 1 - p);
    EXPECT_EQ(t.probability({1, 1, 1}), p);
    for (const auto& v : std::vector<std::vector<int>>{{0, 0, 1}, {1, 0, 0}, {1, 0, 1}, {0, 1, 0}, {0, 1, 1}, {1, 1, 0}}) {
      EXPECT_EQ(t.probability(v), 0.0);
    }
    EXPECT_NEAR(t.total(), 1.0, 1e-12);
  }
}

TEST(Counterexample, InterventionOnFirstTreatment) {
  const double p = 0.3;
  for (const auto* scm : {&kConj, &kColl}) {
    const auto zero = enumerate_distribution(*scm, Regime::single(0, 0.0));
    EXPECT_EQ(zero.probability({0, 0}), 1.0);
    EXPECT_EQ(zero.probability({1, 1}), 0.0);
    const auto one = enumerate_distribution(*scm, Regime::single(0, 1.0));
    EXPECT_EQ(one.probability({0, 0}), 1 - p);
    EXPECT_EQ(one.probability({1, 1}), p);
    EXPECT_EQ(one.probability({0, 1}), 0.0);
    EXPECT_EQ(one.probability({1, 0}), 0.0);
  }
}

TEST(Counterexample, InterventionOnSecondTreatment) {
  const double p = 0.3;
  for (const auto* scm : {&kConj, &kColl}) {
    const auto zero = enumerate_distribution(*scm, Regime::single(1, 0.0));
    EXPECT_EQ(zero.probability({0, 0}), 1 - p);
    EXPECT_EQ(zero.probability({1, 0}), p);
    EXPECT_EQ(zero.probability({0, 1}), 0.0);
    EXPECT_EQ(zero.probability({1, 1}), 0.0);
    const auto one = enumerate_distribution(*scm, Regime::single(1, 1.0));
    EXPECT_EQ(one.probability({0, 0}), 1 - p);
    EXPECT_EQ(one.probability({1, 1}), p);
  }
}

TEST(Counterexample, JointInterventionDiffers) {
  const double p = 0.3;
  const Regime joint = Regime::joint({0.0, 1.0});
  const auto conj = enumerate_distribution(kConj, joint);
  const auto coll = enumerate_distribution(kColl, joint);
  EXPECT_EQ(conj.probability({0}), 1.0);
  EXPECT_EQ(conj.probability({1}), 0.0);
  EXPECT_EQ(coll.probability({1}), p);
  EXPECT_EQ(coll.probability({0}), 1 - p);
  EXPECT_DOUBLE_EQ(total_variation(conj, coll), p);
}

TEST(Counterexample, ReportOverGrid) {
  for (double p : {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9}) {
    const auto report = verify_unidentifiability(p);
    EXPECT_TRUE(report.shared_regimes_agree);
    EXPECT_EQ(report.shared.size(), 5u);
    for (const auto& c : report.shared) EXPECT_LE(c.max_abs_difference, 1e-15);
    EXPECT_NEAR(report.joint_tv_distance, p, 1e-15);
  }
}

TEST(Counterexample, DegenerateProbabilityRejected) {
  EXPECT_THROW(verify_unidentifiability(0.0), std::invalid_argument);
  EXPECT_THROW(verify_unidentifiability(1.0), std::invalid_argument);
  EXPECT_THROW(DiscreteScm(DiscreteScm::Variant::collapsed, -0.1), std::invalid_argument);
}

TEST(Counterexample, InvalidLevelRejected) {
  EXPECT_ANY_THROW(enumerate_distribution(kConj, Regime::single(0, 2.0)));
  EXPECT_ANY_THROW(enumerate_distribution(kConj, Regime::single(0)));
}

TEST(Counterexample, CsvHasOneLinePerEntry) {
  std::ostringstream out;
  write_report_csv(out, verify_unidentifiability(0.5));
  const std::string text = out.str();
  EXPECT_EQ(text.rfind("p,regime,X1,X2,Y,prob_conj,prob_coll\n", 0), 0u);
  // 8 observational, 4 x 4 single-intervention, 2 joint entries, header and TV line.
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 8 + 16 + 2 + 2);
}

}  // namespace
}  // namespace jointfx
