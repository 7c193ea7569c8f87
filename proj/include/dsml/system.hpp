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

// System and task definitions shared by the rollout, SAA and planner code.

#pragma once

#include <functional>
#include <string>
#include <vector>

#include "dsml/gp.hpp"

namespace dsml {

/// Compact box over the augmented state (x, u).
struct ExplorationRegion {
  Vector lower;
  Vector upper;

  void validate() const;
  int dim() const { return static_cast<int>(lower.size()); }
  Vector clamp(const Vector& x) const;
  Vector center() const { return 0.5 * (lower + upper); }
  bool contains(const Vector& x) const;
};

using Dynamics = std::function<Vector(const Vector& augmented)>;

struct SystemSpec {
  int state_dim = 0;
  int input_dim = 0;
  /// A-priori known additive component f.
  Dynamics known_dynamics;
  /// Ground truth for the unknown component; only used for validation and
  /// prior-data generation. May be empty.
  Dynamics true_unknown;
  /// Process noise w = Q * xi, xi ~ N(0, I).
  Matrix noise_scale;
  /// Augmented-state indices the unknown component depends on.
  std::vector<int> gp_input_projection;

  int augmented_dim() const { return state_dim + input_dim; }
  void validate() const;
};

/// u = law(state, controller GP, t). Must be deterministic.
using ControlLaw = std::function<Vector(const Vector& state, const MultiGP& gp, int t)>;
/// h(augmented state, t); the task is satisfied at t when every entry <= 0.
using ConstraintFn = std::function<Vector(const Vector& augmented, int t)>;

struct TaskSpec {
  int id = 1;
  ControlLaw control_law;
  ConstraintFn constraints;
  int num_constraints = 1;
  int horizon = 1;
  Vector initial_state;
};

/// Checks that tasks are non-empty, share one horizon and match the system.
void validate_tasks(const SystemSpec& system, const std::vector<TaskSpec>& tasks);

Vector augment(const Vector& state, const Vector& input);

/// Measurement locations X_N: one augmented state per measurement.
using CandidateLocations = std::vector<Vector>;

/// Everything the rollout needs besides the locations and the random draws.
struct Problem {
  SystemSpec system;
  std::vector<TaskSpec> tasks;
  /// GP over the unknown component, conditioned on prior data.
  MultiGP prior_gp;

  int horizon() const { return tasks.front().horizon; }
  int num_tasks() const { return static_cast<int>(tasks.size()); }
  void validate() const;
};

}  // namespace dsml
