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

#include "jointfx/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "jointfx/errors.hpp"
#include "jointfx/rng.hpp"
#include "jointfx/stats.hpp"

namespace jointfx {

double mae(std::span<const double> pred, std::span<const double> truth) {
  if (pred.size() != truth.size()) throw std::invalid_argument("mae: length mismatch");
  if (pred.empty()) throw std::invalid_argument("mae: empty input");
  double acc = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) acc += std::abs(pred[i] - truth[i]);
  return acc / static_cast<double>(pred.size());
}

std::vector<double> average_ranks(std::span<const double> values) {
  std::vector<std::size_t> idx(values.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  std::size_t i = 0;
  while (i < idx.size()) {
    std::size_t j = i;
    while (j + 1 < idx.size() && values[idx[j + 1]] == values[idx[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

std::optional<double> spearman(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("spearman: length mismatch");
  if (a.size() < 2) throw std::invalid_argument("spearman: need at least two values");
  const auto ra = average_ranks(a);
  const auto rb = average_ranks(b);
  const double ma = mean(ra);
  const double mb = mean(rb);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    sab += (ra[i] - ma) * (rb[i] - mb);
    saa += (ra[i] - ma) * (ra[i] - ma);
    sbb += (rb[i] - mb) * (rb[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) return std::nullopt;
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

Eigen::MatrixXd uniform_test_points(const Eigen::MatrixXd& reference, std::size_t count, std::uint64_t seed) {
  if (reference.rows() == 0 || reference.cols() == 0) throw std::invalid_argument("empty reference sample");
  const Eigen::RowVectorXd lo = reference.colwise().minCoeff();
  const Eigen::RowVectorXd hi = reference.colwise().maxCoeff();
  Rng rng(seed);
  Eigen::MatrixXd points(static_cast<Eigen::Index>(count), reference.cols());
  for (Eigen::Index r = 0; r < points.rows(); ++r) {
    for (Eigen::Index c = 0; c < points.cols(); ++c) points(r, c) = rng.uniform(lo[c], hi[c]);
  }
  return points;
}

Eigen::MatrixXd uniform_test_points(const Scm& scm, std::size_t count, std::uint64_t seed) {
  const RegimeDataset pilot = sample(scm, Regime::observational(), 10000, derive_seed(seed, 1));
  const auto k = static_cast<Eigen::Index>(scm.treatment_count());
  return uniform_test_points(Eigen::MatrixXd(pilot.values.leftCols(k)), count, derive_seed(seed, 2));
}

Eigen::VectorXd kde_log_density(const Eigen::MatrixXd& sample, const Eigen::MatrixXd& points) {
  const Eigen::Index n = sample.rows();
  const Eigen::Index d = sample.cols();
  if (n < 2) throw std::invalid_argument("kde needs at least two sample rows");
  if (points.cols() != d) throw std::invalid_argument("kde: dimension mismatch");
  const Eigen::RowVectorXd mu = sample.colwise().mean();
  const Eigen::RowVectorXd sd =
      ((sample.rowwise() - mu).array().square().colwise().sum() / static_cast<double>(n - 1)).sqrt();
  const double factor = std::pow(static_cast<double>(n), -1.0 / static_cast<double>(d + 4));
  const Eigen::RowVectorXd bandwidth = sd * factor;
  if ((bandwidth.array() <= 0.0).any()) throw NumericalError("kde: zero-variance column");
  const double log_norm = -0.5 * static_cast<double>(d) * std::log(2.0 * 3.14159265358979323846) -
                          bandwidth.array().log().sum() - std::log(static_cast<double>(n));

  Eigen::VectorXd out(points.rows());
  Eigen::VectorXd exponents(n);
  for (Eigen::Index p = 0; p < points.rows(); ++p) {
    exponents = -0.5 * ((sample.rowwise() - points.row(p)).array().rowwise() / bandwidth.array())
                           .square()
                           .rowwise()
                           .sum()
                           .matrix();
    const double top = exponents.maxCoeff();
    out[p] = log_norm + top + std::log((exponents.array() - top).exp().sum());
  }
  return out;
}

std::vector<std::size_t> kde_rank(const Eigen::MatrixXd& sample, const Eigen::MatrixXd& points) {
  const Eigen::VectorXd density = kde_log_density(sample, points);
  std::vector<std::size_t> idx(static_cast<std::size_t>(points.rows()));
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return density[static_cast<Eigen::Index>(a)] > density[static_cast<Eigen::Index>(b)];
  });
  std::vector<std::size_t> ranks(idx.size());
  for (std::size_t r = 0; r < idx.size(); ++r) ranks[idx[r]] = r + 1;
  return ranks;
}

std::vector<std::size_t> kde_rank(const RegimeDataset& train_obs, const Eigen::MatrixXd& points) {
  if (!train_obs.regime.is_observational()) throw StructuralError("kde_rank expects observational data");
  if (points.cols() > train_obs.values.cols()) throw std::invalid_argument("kde: too many point columns");
  return kde_rank(Eigen::MatrixXd(train_obs.values.leftCols(points.cols())), points);
}

}  // namespace jointfx
