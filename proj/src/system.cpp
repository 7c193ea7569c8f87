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

#include "dsml/system.hpp"

#include <cmath>

#include "dsml/errors.hpp"

namespace dsml {

void ExplorationRegion::validate() const {
  if (lower.size() != upper.size() || lower.size() == 0)
    throw ConfigError("region: lower/upper must be non-empty and of equal size");
  for (Eigen::Index i = 0; i < lower.size(); ++i) {
    if (!std::isfinite(lower[i]) || !std::isfinite(upper[i]))
      throw ConfigError("region: bounds must be finite");
    if (!(lower[i] < upper[i])) throw ConfigError("region: lower must be below upper");
  }
}

Vector ExplorationRegion::clamp(const Vector& x) const {
  return x.cwiseMax(lower).cwiseMin(upper);
}

bool ExplorationRegion::contains(const Vector& x) const {
  return x.size() == lower.size() && (x.array() >= lower.array()).all() &&
         (x.array() <= upper.array()).all();
}

void SystemSpec::validate() const {
  if (state_dim < 1 || input_dim < 0) throw ConfigError("system: invalid dimensions");
  if (!known_dynamics) throw ConfigError("system: known dynamics missing");
  if (noise_scale.rows() != state_dim || noise_scale.cols() != state_dim)
    throw ConfigError("system: noise scale must be state_dim x state_dim");
  if (!noise_scale.allFinite()) throw ConfigError("system: noise scale must be finite");
  if (gp_input_projection.empty()) throw ConfigError("system: empty GP input projection");
  for (int idx : gp_input_projection)
    if (idx < 0 || idx >= augmented_dim())
      throw ConfigError("system: GP input projection index out of range");
}

void validate_tasks(const SystemSpec& system, const std::vector<TaskSpec>& tasks) {
  if (tasks.empty()) throw ConfigError("tasks: at least one task is required");
  const int horizon = tasks.front().horizon;
  for (const auto& task : tasks) {
    if (task.horizon < 1) throw ConfigError("tasks: horizon must be at least 1");
    if (task.horizon != horizon) throw ConfigError("tasks: all tasks must share one horizon");
    if (!task.control_law || !task.constraints)
      throw ConfigError("tasks: control law and constraints are required");
    if (task.num_constraints < 1) throw ConfigError("tasks: need at least one constraint");
    if (task.initial_state.size() != system.state_dim)
      throw ConfigError("tasks: initial state has wrong dimension");
  }
}

Vector augment(const Vector& state, const Vector& input) {
  Vector out(state.size() + input.size());
  out << state, input;
  return out;
}

void Problem::validate() const {
  system.validate();
  validate_tasks(system, tasks);
  if (prior_gp.output_dim() != system.state_dim)
    throw ConfigError("problem: GP output dimension must equal the state dimension");
  if (prior_gp.params().input_projection != system.gp_input_projection)
    throw ConfigError("problem: GP input projection differs from the system's");
}

}  // namespace dsml
