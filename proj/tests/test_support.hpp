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

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "jointfx/scm.hpp"

namespace jointfx::testing_support {

/// X1 -> X2 -> Y with X1 -> Y, linear equations unless coefficients say otherwise.
inline Scm k2_scm(std::vector<double> x2, std::vector<double> y, const Eigen::Matrix3d& sigma) {
  std::vector<CausalGraph::Edge> bidirected;
  const std::vector<std::string> names{"X1", "X2", "Y"};
  for (int i = 0; i < 3; ++i) {
    for (int j = i + 1; j < 3; ++j) {
      if (sigma(i, j) != 0.0) bidirected.emplace_back(names[static_cast<std::size_t>(i)], names[static_cast<std::size_t>(j)]);
    }
  }
  CausalGraph g(names, {{"X1", "X2"}, {"X1", "Y"}, {"X2", "Y"}}, bidirected);
  return Scm(g,
             {PolynomialEquation::constant("X1", 0.0), PolynomialEquation("X2", {"X1"}, std::move(x2)),
              PolynomialEquation("Y", {"X1", "X2"}, std::move(y))},
             sigma);
}

inline double sample_mean(const Eigen::VectorXd& v) { return v.mean(); }

inline double sample_sd(const Eigen::VectorXd& v) {
  return std::sqrt((v.array() - v.mean()).square().sum() / static_cast<double>(v.size() - 1));
}

}  // namespace jointfx::testing_support
