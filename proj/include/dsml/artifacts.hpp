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

// Result files: plan.json, satisfaction_vs_N.csv, locations.csv,
// violations.csv and report.json. CSV numbers use the shortest
// representation that reads back to the same double.

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "dsml/config.hpp"
#include "dsml/validation.hpp"

namespace dsml {

std::string format_double(double value);

struct RepetitionPlan {
  RepetitionData data;
  PlanResult result;
};

struct PlanFile {
  RunConfig config;
  std::vector<RepetitionPlan> repetitions;
};

std::string plan_to_json(const PlanFile& plan);
/// Inverse of plan_to_json. Throws ConfigError on malformed input.
PlanFile plan_from_json(const std::string& text, const std::string& source = "<plan>");

/// Columns: N, one per repetition (empty after it stopped), mean, std.
std::string satisfaction_csv(const PlanFile& plan);
/// Columns: repetition, index, then one per augmented coordinate.
std::string locations_csv(const PlanFile& plan);
/// Columns: task, t, mean_violation, std_violation, max_violation,
/// violating_runs.
std::string violations_csv(const ValidationReport& report);
std::string report_json(const ValidationReport& pooled, const PlanFile& plan,
                        const std::vector<ValidationReport>& per_repetition);

/// Splits CSV text into rows of fields (no quoting is ever needed here).
std::vector<std::vector<std::string>> parse_csv(const std::string& text);

std::string read_text(const std::filesystem::path& path);
/// Creates parent directories as needed.
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace dsml
