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
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "jointfx/estimator.hpp"
#include "jointfx/rng.hpp"
#include "jointfx/scm.hpp"

namespace jointfx {

/// Same regime and size, rows drawn with replacement.
RegimeDataset resample_rows(const RegimeDataset& data, Rng& rng);

struct PredictionInterval {
  double lower = 0.0;
  double upper = 0.0;
  double width() const { return upper - lower; }
};

struct BootstrapResult {
  std::vector<PredictionInterval> intervals;
  /// One row per successful refit, one column per test point.
  Eigen::MatrixXd predictions;
  std::size_t failures = 0;
};

struct BootstrapOptions {
  double level = 0.95;
  FitConfig fit;
};

/// Percentile intervals of the joint-effect prediction at each test point over
/// `b` refits, resampling rows within each regime independently. Failed refits
/// are dropped and counted; more than b/2 failures raise NumericalError.
BootstrapResult bootstrap_intervals(std::span<const RegimeDataset> datasets, const CausalGraph& graph,
                                    const Eigen::MatrixXd& test_points, std::size_t b, std::uint64_t seed,
                                    const BootstrapOptions& options = {});

}  // namespace jointfx
