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

#include "jointfx/bootstrap.hpp"

#include <optional>
#include <stdexcept>

#include "jointfx/errors.hpp"
#include "jointfx/stats.hpp"
#include "jointfx/work_pool.hpp"

namespace jointfx {

RegimeDataset resample_rows(const RegimeDataset& data, Rng& rng) {
  RegimeDataset out{data.regime, data.columns, Eigen::MatrixXd(data.values.rows(), data.values.cols())};
  const auto n = data.rows();
  for (Eigen::Index r = 0; r < out.values.rows(); ++r) {
    out.values.row(r) = data.values.row(static_cast<Eigen::Index>(rng.index(n)));
  }
  return out;
}

BootstrapResult bootstrap_intervals(std::span<const RegimeDataset> datasets, const CausalGraph& graph,
                                    const Eigen::MatrixXd& test_points, std::size_t b, std::uint64_t seed,
                                    const BootstrapOptions& options) {
  if (b < 2) throw std::invalid_argument("bootstrap needs at least two replicates");
  if (!(options.level > 0.0 && options.level < 1.0)) throw std::invalid_argument("interval level must lie in (0, 1)");
  const auto m = static_cast<std::size_t>(test_points.rows());

  using Row = std::optional<std::vector<double>>;
  const auto rows = parallel_map<Row>(b, [&](std::size_t rep) -> Row {
    Rng rng(derive_seed(seed, rep));
    std::vector<RegimeDataset> resampled;
    for (const auto& ds : datasets) resampled.push_back(resample_rows(ds, rng));
    try {
      const FittedAnm model = fit(resampled, graph, options.fit);
      std::vector<double> preds(m);
      std::vector<double> x(static_cast<std::size_t>(test_points.cols()));
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < x.size(); ++j) {
          x[j] = test_points(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        }
        preds[i] = predict_joint_effect(model, x);
      }
      return preds;
    } catch (const NumericalError&) {
      return std::nullopt;
    }
  });

  BootstrapResult result;
  std::vector<std::vector<double>> ok;
  for (const auto& r : rows) {
    if (r) {
      ok.push_back(*r);
    } else {
      ++result.failures;
    }
  }
  if (result.failures * 2 > b) {
    throw NumericalError("bootstrap: " + std::to_string(result.failures) + " of " + std::to_string(b) +
                         " refits failed");
  }
  result.predictions.resize(static_cast<Eigen::Index>(ok.size()), static_cast<Eigen::Index>(m));
  for (std::size_t r = 0; r < ok.size(); ++r) {
    for (std::size_t i = 0; i < m; ++i) {
      result.predictions(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(i)) = ok[r][i];
    }
  }
  const double tail = 0.5 * (1.0 - options.level);
  for (std::size_t i = 0; i < m; ++i) {
    std::vector<double> column(ok.size());
    for (std::size_t r = 0; r < ok.size(); ++r) column[r] = ok[r][i];
    result.intervals.push_back({quantile(column, tail), quantile(column, 1.0 - tail)});
  }
  return result;
}

}  // namespace jointfx
