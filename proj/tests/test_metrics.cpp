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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <gtest/gtest.h>

#include "jointfx/metrics.hpp"
#include "jointfx/rng.hpp"
#include "jointfx/simgen.hpp"

namespace jointfx {
namespace {

Eigen::MatrixXd gaussian_sample(Eigen::Index n, Eigen::Index d, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXd m(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) m(i, j) = rng.normal();
  }
  return m;
}

TEST(Mae, MeanOfAbsoluteErrors) {
  const std::vector<double> pred{1.0, 2.0, 3.0, 4.0};
  const std::vector<double> truth{2.0, 0.0, 3.0, 7.0};
  EXPECT_DOUBLE_EQ(mae(pred, truth), 1.5);
  const std::vector<double> empty;
  EXPECT_THROW(mae(empty, empty), std::invalid_argument);
  EXPECT_THROW(mae(pred, std::vector<double>{1.0}), std::invalid_argument);
}

TEST(Spearman, HandComputedValue) {
  // Ranks (1,2,3,4) vs (2,1,4,3): d^2 sum = 4, rho = 1 - 6*4/(4*15) = 0.6.
  const std::vector<double> a{1.0, 2.0, 3.0, 4.0};
  const std::vector<double> b{20.0, 10.0, 40.0, 30.0};
  EXPECT_NEAR(*spearman(a, b), 0.6, 1e-12);
  // Ranks (1,2,3,4,5) vs (2,1,3,5,4): d^2 sum = 4, rho = 1 - 24/120 = 0.8.
  const std::vector<double> c{1.0, 2.0, 3.0, 4.0, 5.0};
  const std::vector<double> d{2.0, 1.0, 3.0, 5.0, 4.0};
  EXPECT_NEAR(*spearman(c, d), 0.8, 1e-12);
}

TEST(Spearman, ReversalAndMonotoneInvariance) {
  Rng rng(1);
  std::vector<double> a(50), b(50), expa(50), neg(50);
  for (std::size_t i = 0; i < a.size(); ++i) {
    a[i] = rng.normal();
    b[i] = a[i] + 0.5 * rng.normal();
    expa[i] = std::exp(3.0 * a[i]);
    neg[i] = -a[i];
  }
  EXPECT_NEAR(*spearman(a, neg), -1.0, 1e-12);
  EXPECT_NEAR(*spearman(a, b), *spearman(expa, b), 1e-12);
}

TEST(Spearman, TiesUseAverageRanks) {
  const std::vector<double> v{3.0, 1.0, 3.0, 2.0};
  EXPECT_EQ(average_ranks(v), (std::vector<double>{3.5, 1.0, 3.5, 2.0}));
  const std::vector<double> constant{1.0, 1.0, 1.0};
  const std::vector<double> other{1.0, 2.0, 3.0};
  EXPECT_FALSE(spearman(constant, other).has_value());
  // Pearson correlation of the average ranks (1.5,1.5,3) and (1,2,3) is sqrt(3)/2.
  const std::vector<double> tied{5.0, 5.0, 9.0};
  EXPECT_NEAR(*spearman(tied, other), std::sqrt(3.0) / 2.0, 1e-12);
}

TEST(UniformTestPoints, StayInsideTheBoxAndFillIt) {
  Eigen::MatrixXd ref(3, 2);
  ref << -1.0, 10.0, 2.0, 12.0, 0.5, 11.0;
  const Eigen::MatrixXd pts = uniform_test_points(ref, 4000, 7);
  ASSERT_EQ(pts.rows(), 4000);
  ASSERT_EQ(pts.cols(), 2);
  EXPECT_GE(pts.col(0).minCoeff(), -1.0);
  EXPECT_LE(pts.col(0).maxCoeff(), 2.0);
  EXPECT_GE(pts.col(1).minCoeff(), 10.0);
  EXPECT_LE(pts.col(1).maxCoeff(), 12.0);
  // Uniform mean and variance: 0.5 and 9/12 for the first column.
  EXPECT_NEAR(pts.col(0).mean(), 0.5, 0.05);
  EXPECT_NEAR((pts.col(0).array() - 0.5).square().mean(), 0.75, 0.05);
  EXPECT_EQ(uniform_test_points(ref, 10, 7), uniform_test_points(ref, 10, 7));
}

TEST(UniformTestPoints, ScmOverloadCoversTreatments) {
  const Scm scm = build_synthetic_k3(default_k3_coefficients(), random_correlation_matrix(4, 0.5, 1), 0);
  const Eigen::MatrixXd pts = uniform_test_points(scm, 100, 3);
  EXPECT_EQ(pts.cols(), 3);
  EXPECT_EQ(pts.rows(), 100);
}

TEST(KdeRank, CentreBeatsFarPoint) {
  const Eigen::MatrixXd sample = gaussian_sample(500, 3, 2);
  Eigen::MatrixXd points(2, 3);
  points.row(0) = sample.colwise().mean();
  points.row(1).setConstant(5.0 + sample.maxCoeff());
  const auto ranks = kde_rank(sample, points);
  EXPECT_EQ(ranks, (std::vector<std::size_t>{1, 2}));
}

TEST(KdeRank, RanksArePermutation) {
  const Eigen::MatrixXd sample = gaussian_sample(300, 2, 3);
  const Eigen::MatrixXd points = gaussian_sample(25, 2, 4) * 2.0;
  auto ranks = kde_rank(sample, points);
  std::sort(ranks.begin(), ranks.end());
  std::vector<std::size_t> expected(25);
  std::iota(expected.begin(), expected.end(), 1);
  EXPECT_EQ(ranks, expected);
}

TEST(KdeRank, DatasetOverloadUsesLeadingColumns) {
  RegimeDataset obs{Regime::observational(), {"X1", "X2", "Y"}, gaussian_sample(200, 3, 5)};
  const Eigen::MatrixXd points = gaussian_sample(10, 2, 6);
  EXPECT_EQ(kde_rank(obs, points), kde_rank(Eigen::MatrixXd(obs.values.leftCols(2)), points));
}

TEST(KdeLogDensity, IntegratesToOne) {
  const Eigen::MatrixXd sample = gaussian_sample(400, 2, 8);
  const int cells = 200;
  const double lo = sample.minCoeff() - 3.0, hi = sample.maxCoeff() + 3.0;
  const double step = (hi - lo) / cells;
  Eigen::MatrixXd grid(cells * cells, 2);
  for (int i = 0; i < cells; ++i) {
    for (int j = 0; j < cells; ++j) {
      grid.row(i * cells + j) << lo + (i + 0.5) * step, lo + (j + 0.5) * step;
    }
  }
  const double integral = kde_log_density(sample, grid).array().exp().sum() * step * step;
  EXPECT_NEAR(integral, 1.0, 0.05);
}

}  // namespace
}  // namespace jointfx
