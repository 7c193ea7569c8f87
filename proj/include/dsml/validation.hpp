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

// Closed-loop Monte Carlo runs of the true system with a controller GP
// trained on measurements actually taken at the planned locations.

#pragma once

#include <cstdint>
#include <vector>

#include "dsml/system.hpp"

namespace dsml {

struct TaskValidation {
  int task = 1;
  /// Index t - 1 for t = 1..H.
  std::vector<int> violation_counts;
  /// Mean and std over runs of max_i max(0, [h_t]_i).
  std::vector<double> mean_violation;
  std::vector<double> std_violation;
  std::vector<double> max_violation;
  int violating_runs = 0;
  double violation_rate = 0.0;
};

struct ValidationReport {
  int runs = 0;
  int horizon = 0;
  std::vector<TaskValidation> tasks;
  /// A run violates when any of its tasks violates at any step.
  int violating_runs = 0;
  double violation_rate = 0.0;
  double satisfaction_rate = 1.0;
  /// Runs aborted by divergence or a dynamics error (counted as violating).
  int failed_runs = 0;
};

/// Measures the true system at `locations` (known + true unknown + noise),
/// conditions the prior GP on those measurements with the kernel noise, then
/// simulates every task `runs` times from its initial state. Throws
/// ConfigError when the system has no true_unknown.
ValidationReport validate_plan(const Problem& problem, const CandidateLocations& locations,
                               int runs, std::uint64_t seed);

/// Pools reports of equal horizon and task count (e.g. over repetitions).
ValidationReport merge_reports(const std::vector<ValidationReport>& reports);

}  // namespace dsml
