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
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "jointfx/scm.hpp"

namespace jointfx {

/// Mean absolute error. Throws std::invalid_argument on empty or mismatched input.
double mae(std::span<const double> pred, std::span<const double> truth);

/// 1-based ranks, ties receive the average of the ranks they span.
std::vector<double> average_ranks(std::span<const double> values);

/// Spearman rank correlation; nullopt when either input is constant.
std::optional<double> spearman(std::span<const double> a, std::span<const double> b);

/// `count` points drawn uniformly from the per-column [min, max] box of
/// `reference` (rows are observations).
Eigen::MatrixXd uniform_test_points(const Eigen::MatrixXd& reference, std::size_t count, std::uint64_t seed);

/// Box taken from the treatment columns of a 10^4-row observational sample of `scm`.
Eigen::MatrixXd uniform_test_points(const Scm& scm, std::size_t count, std::uint64_t seed);

/// Log density of a product-Gaussian-kernel KDE with Scott's bandwidth
/// n^(-1/(d+4)) * std per dimension, evaluated at each row of `points`.
Eigen::VectorXd kde_log_density(const Eigen::MatrixXd& sample, const Eigen::MatrixXd& points);

/// Ranks of `points` by KDE density under `sample`; rank 1 is the densest.
std::vector<std::size_t> kde_rank(const Eigen::MatrixXd& sample, const Eigen::MatrixXd& points);

/// Uses the first points.cols() columns of the observational data.
std::vector<std::size_t> kde_rank(const RegimeDataset& train_obs, const Eigen::MatrixXd& points);

}  // namespace jointfx
