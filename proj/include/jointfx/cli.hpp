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

#include <iosfwd>

namespace jointfx {

/// Exit statuses of the command-line interface.
enum ExitCode : int {
  kExitSuccess = 0,
  kExitUsage = 1,
  kExitNumerical = 2,
  kExitVerifyMismatch = 3,
};

/// Parses argv and runs one subcommand:
///   simulate | fit | predict | identify2 | counterexample | experiment <kind>
/// with global flags --seed, --out, --config and --verify.
int cli_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace jointfx
