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

#include <span>

namespace jointfx {

double mean(std::span<const double> values);

/// Unbiased (n - 1) sample variance. Requires at least two values.
double sample_variance(std::span<const double> values);

/// Linearly interpolated empirical quantile (the "type 7" rule), q in [0, 1].
double quantile(std::span<const double> values, double q);

}  // namespace jointfx
