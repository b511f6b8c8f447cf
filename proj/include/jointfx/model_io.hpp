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

#include "jointfx/estimator.hpp"
#include "jointfx/io.hpp"

namespace jointfx {

json fit_config_to_json(const FitConfig& config);
/// Missing keys keep their defaults; unknown keys are rejected.
FitConfig fit_config_from_json(const json& doc);

/// SCM document (graph, equations, noise_cov = sigma0) extended with
/// "noise_covs", "fit_trace", "status", "rounds" and "config_used".
json model_to_json(const FittedAnm& model);
FittedAnm model_from_json(const json& doc);

}  // namespace jointfx
