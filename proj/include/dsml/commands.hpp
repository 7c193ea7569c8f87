/*
 * Copyright 2026 The dsml Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// The three subcommands behind the dsml executable. Each returns the
// process exit code: 0 satisfied, 1 error, 2 planner hit its cap.

#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>

namespace dsml {

inline constexpr int kExitSatisfied = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitCap = 2;

struct CommandOptions {
  /// Path to a JSON config, or the name of the built-in preset "paper-demo".
  std::string config;
  std::optional<std::uint64_t> seed;
  /// Overrides output.directory when non-empty.
  std::string out_dir;
  std::optional<int> runs;
  bool full_scale = false;
};

/// Plans every repetition; writes plan.json, satisfaction_vs_N.csv and
/// locations.csv.
int cmd_plan(const CommandOptions& options, std::ostream& out, std::ostream& err);
/// Reads <out>/plan.json, validates against the true system and writes
/// violations.csv and report.json. The exit code mirrors the plan's
/// termination.
int cmd_validate(const CommandOptions& options, std::ostream& out, std::ostream& err);
/// plan + validate on the paper-demo preset (desk scale unless full_scale)
/// and a summary table.
int cmd_demo(const CommandOptions& options, std::ostream& out, std::ostream& err);

}  // namespace dsml
