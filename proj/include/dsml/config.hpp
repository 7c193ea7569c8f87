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

// Run configuration: a JSON document describing the system, the tasks, the
// GP and its prior data, the planner and the outputs. Presets are resolved
// into plain values here; build_problem() turns a configuration into the
// library's Problem for one repetition.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dsml/planner.hpp"

namespace dsml {

/// demo-1, demo-2, demo-3 or constant (uses `value`).
struct ReferenceConfig {
  std::string type = "constant";
  Vector value;

  bool operator==(const ReferenceConfig&) const;
};

/// feedback-linearizing: u = ref(t + lead) - mu(x); zero: u = 0;
/// gain: u = -gain * x (requires input_dim == state_dim).
struct ControllerConfig {
  std::string type = "zero";
  ReferenceConfig reference;
  int reference_lead = 0;
  double gain = 0.0;

  bool operator==(const ControllerConfig&) const;
};

/// demo-tracking: ||x - ref(t)|| - phi(t); demo-x1-bound: |x1| - 5/2;
/// abs-bound: |x[index] - center| - bound; always-satisfied: -1;
/// always-violated: +1.
struct ConstraintConfig {
  std::string type = "always-satisfied";
  ReferenceConfig reference;
  int index = 0;
  double center = 0.0;
  double bound = 0.0;

  bool operator==(const ConstraintConfig&) const;
};

/// fixed (`value`) or uniform over [lower, upper], drawn once per repetition.
struct InitialStateConfig {
  std::string policy = "fixed";
  Vector value;
  Vector lower;
  Vector upper;

  bool operator==(const InitialStateConfig&) const;
};

struct TaskConfig {
  int id = 1;
  ControllerConfig controller;
  std::vector<ConstraintConfig> constraints;
  InitialStateConfig initial_state;

  bool operator==(const TaskConfig&) const = default;
};

/// preset paper-demo: known(x, u) = u, unknown = demo dynamics.
/// preset linear: known(x, u) = A x + B u, unknown zero or G * (x, u).
struct SystemConfig {
  std::string preset = "linear";
  std::string dynamics_variant = "logistic";
  int state_dim = 1;
  int input_dim = 1;
  Matrix a;
  Matrix b;
  std::string unknown = "zero";
  Matrix unknown_matrix;
  Matrix noise_scale;

  bool operator==(const SystemConfig&) const;
};

/// none; random-uniform: `count` states uniform in [lower, upper] observed
/// through the true system with zero input; inline: given points/values.
struct PriorDataConfig {
  std::string source = "none";
  int count = 0;
  Vector lower;
  Vector upper;
  std::vector<Vector> points;
  Matrix values;

  bool operator==(const PriorDataConfig&) const;
};

struct GPConfig {
  KernelParams kernel;
  PriorDataConfig prior_data;

  bool operator==(const GPConfig&) const = default;
};

struct OutputConfig {
  std::string directory = "out";
  int validation_runs = 100;

  bool operator==(const OutputConfig&) const = default;
};

struct RunConfig {
  std::string name = "custom";
  SystemConfig system;
  int horizon = 1;
  std::vector<TaskConfig> tasks;
  GPConfig gp;
  PlannerConfig planner;
  int repetitions = 1;
  OutputConfig output;

  bool operator==(const RunConfig&) const;
  /// Structural checks; throws ConfigError.
  void validate() const;
};

bool operator==(const PlannerConfig& a, const PlannerConfig& b);

/// Parses and validates. Errors carry "source:line: message".
RunConfig parse_config(const std::string& text, const std::string& source = "<config>");
RunConfig load_config(const std::string& path);
std::string serialize_config(const RunConfig& config);

/// The benchmark preset at the published scale (H = 100, M = 100, 10
/// repetitions).
RunConfig paper_demo_config();
/// Reduced scale used by the demo command: H = 40, M = 50, 3 repetitions.
RunConfig desk_scale(RunConfig config);

/// Inputs drawn for one repetition.
struct RepetitionData {
  int index = 0;
  std::uint64_t seed = 0;
  std::vector<Vector> prior_points;
  Matrix prior_values;
  std::vector<Vector> initial_states;
};

std::uint64_t repetition_seed(std::uint64_t seed, int repetition);
/// Draws prior data and initial states for repetition `index`.
RepetitionData draw_repetition(const RunConfig& config, int index);

SystemSpec build_system(const SystemConfig& config);
/// Problem for the given draws; prior GP conditioned on the prior data.
Problem build_problem(const RunConfig& config, const RepetitionData& data);
/// Planner settings for a repetition (seed replaced by a derived one).
PlannerConfig repetition_planner(const RunConfig& config, const RepetitionData& data);

}  // namespace dsml
