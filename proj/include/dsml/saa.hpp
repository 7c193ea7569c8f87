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

// Sample-average approximation of the joint constraint-satisfaction
// probability and the hinge surrogate minimized by the location optimizer.

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "dsml/rollout.hpp"

namespace dsml {

struct SAAEstimate {
  /// Fraction of samples whose rollout satisfies every constraint.
  double value = 0.0;
  std::vector<std::uint8_t> indicators;
  /// L x H; entry (j, t-1) is the sample mean of max_i max(0, [h_t^j]_i).
  Matrix violation_profile;
  /// Samples whose rollout failed (GP breakdown or divergence).
  int failures = 0;
};

struct SurrogateValue {
  double value = 0.0;
  /// Over the flattened locations (location-major); zero for coordinates
  /// the GP does not read.
  std::optional<Vector> gradient;
};

struct Evaluation {
  SAAEstimate estimate;
  double surrogate = 0.0;
  /// Hinge sum of each sample; the surrogate is their mean.
  std::vector<double> per_sample_surrogate;
};

/// Hinge charged for every constraint entry a failed rollout never reached.
inline constexpr double kFailurePenalty = 1.0;
/// Central-difference step for the surrogate gradient.
inline constexpr double kGradientStep = 1e-4;

/// One pass over the batch giving both the estimate and the surrogate.
/// Constraints are checked for t = 1..H; t = 0 is unconstrained.
Evaluation evaluate(const CandidateLocations& locations, const Problem& problem,
                    const SampleBatch& batch);

SAAEstimate estimate_satisfaction(const CandidateLocations& locations, const Problem& problem,
                                  const SampleBatch& batch);

/// (1/M) sum_m sum_j sum_t sum_i max(0, [h_t^j]_i).
SurrogateValue surrogate(const CandidateLocations& locations, const Problem& problem,
                         const SampleBatch& batch, bool with_gradient = false);

/// Coordinates of a location the optimizer may move (the GP inputs).
std::vector<int> active_coordinates(const Problem& problem);

}  // namespace dsml
