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

// The outer data-selection loop: grow the number of measurement locations
// until their optimized SAA satisfaction estimate clears 1 - delta.

#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "dsml/saa.hpp"

namespace dsml {

struct OptimizerSettings {
  /// Largest move per coordinate; the gradient is scaled to unit max-norm.
  double step_size = 0.5;
  int max_iterations = 200;
  /// Stop when the surrogate improved by less than this over `patience` iterations.
  double tolerance = 1e-6;
  int patience = 10;

  bool operator==(const OptimizerSettings&) const = default;
};

struct PlannerConfig {
  double delta = 0.01;
  int samples = 100;
  int max_N = 20;
  int restarts = 4;
  /// Start 0 at size N reuses the size N-1 optimum plus one uniform draw.
  bool warm_start = false;
  /// Uniform draws tried for that extra location; the lowest surrogate wins.
  int warm_start_candidates = 1;
  OptimizerSettings optimizer;
  ExplorationRegion region;
  std::uint64_t seed = 0;

  void validate(int augmented_dim) const;
};

enum class Termination { Satisfied, Cap };

struct OptimizerTrace {
  int N = 0;
  int start = 0;
  /// Surrogate value after each accepted step (entry 0: initial value).
  std::vector<double> surrogate;
  double satisfaction = 0.0;
  int iterations = 0;
  int failures = 0;
};

struct LocationOptimum {
  CandidateLocations locations;
  SAAEstimate estimate;
  double surrogate = 0.0;
  int start = 0;
  std::vector<OptimizerTrace> traces;
};

struct HistoryEntry {
  int N = 0;
  double satisfaction = 0.0;

  bool operator==(const HistoryEntry&) const = default;
};

struct PlanResult {
  CandidateLocations locations;
  int N_final = 0;
  std::vector<HistoryEntry> satisfaction_history;
  /// One list of traces per N >= 1.
  std::vector<std::vector<OptimizerTrace>> traces;
  Termination terminated_by = Termination::Cap;
};

/// Seed of the sample batch drawn for data-set size N.
std::uint64_t batch_seed(std::uint64_t seed, int N);

/// Multi-start projected gradient descent on the surrogate. Returns the
/// start with the highest satisfaction estimate (ties: lower surrogate, then
/// lower start index). Stops early once a start reaches satisfaction 1.
/// `previous` (N - 1 locations) seeds start 0 when config.warm_start is set.
LocationOptimum optimize_locations(int N, const Problem& problem, const SampleBatch& batch,
                                   const PlannerConfig& config,
                                   const CandidateLocations& previous = {});

using PlanProgress = std::function<void(const HistoryEntry&)>;

/// Grows N from 0 with a fresh batch per N until the estimate exceeds
/// 1 - delta or N reaches max_N. `progress` sees every history entry.
PlanResult plan(const Problem& problem, const PlannerConfig& config,
                const PlanProgress& progress = {});

}  // namespace dsml
