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

#include "dsml/rollout.hpp"

#include <cmath>
#include <exception>

#include "dsml/errors.hpp"
#include "dsml/rng.hpp"

namespace dsml {

IndexMap IndexMap::build(int measurements, int tasks, int horizon) {
  if (tasks < 1) throw ConfigError("index map: at least one task is required");
  if (horizon < 1) throw ConfigError("index map: horizon must be at least 1");
  if (measurements < 0) throw ConfigError("index map: negative measurement count");
  IndexMap map;
  map.measurements_ = measurements;
  map.tasks_ = tasks;
  map.horizon_ = horizon;
  const auto total = static_cast<std::size_t>(measurements) +
                     static_cast<std::size_t>(tasks) * static_cast<std::size_t>(horizon + 1);
  map.entries_.reserve(total);
  for (int n = 0; n < measurements; ++n)
    map.entries_.push_back({IndexEntry::Kind::Measurement, n + 1, 0, 0});
  for (int j = 1; j <= tasks; ++j)
    for (int t = 0; t <= horizon; ++t)
      map.entries_.push_back({IndexEntry::Kind::Trajectory, 0, j, t});
  return map;
}

std::size_t IndexMap::trajectory_index(int task, int step) const {
  return static_cast<std::size_t>(measurements_) +
         static_cast<std::size_t>(task - 1) * static_cast<std::size_t>(horizon_ + 1) +
         static_cast<std::size_t>(step);
}

SampleBatch::SampleBatch(std::uint64_t seed, int samples, std::size_t sequence_length,
                         int state_dim, std::vector<double> draws)
    : seed_(seed),
      samples_(samples),
      sequence_length_(sequence_length),
      state_dim_(state_dim),
      draws_(std::move(draws)) {
  if (draws_.size() != static_cast<std::size_t>(samples) * sequence_length *
                           static_cast<std::size_t>(2 * state_dim))
    throw InputShapeError("SampleBatch: draw count does not match the shape");
}

std::span<const double> SampleBatch::sample(int m) const {
  const std::size_t stride = sequence_length_ * static_cast<std::size_t>(2 * state_dim_);
  return std::span<const double>(draws_).subspan(static_cast<std::size_t>(m) * stride, stride);
}

std::span<const double> SampleBatch::draw(int m, std::size_t n) const {
  const auto width = static_cast<std::size_t>(2 * state_dim_);
  return sample(m).subspan(n * width, width);
}

SampleBatch generate_batch(std::uint64_t seed, int samples, const IndexMap& index_map,
                           int state_dim) {
  if (samples < 1) throw ConfigError("generate_batch: need at least one sample");
  if (state_dim < 1) throw ConfigError("generate_batch: state dimension must be positive");
  Rng rng(seed);
  std::vector<double> draws(static_cast<std::size_t>(samples) * index_map.total() *
                            static_cast<std::size_t>(2 * state_dim));
  for (double& z : draws) z = rng.normal();
  return SampleBatch(seed, samples, index_map.total(), state_dim, std::move(draws));
}

namespace {

bool diverged(const Vector& x) { return !x.allFinite() || x.norm() > kDivergenceNorm; }

}  // namespace

RolloutResult rollout_one(const CandidateLocations& locations, const Problem& problem,
                          std::span<const double> draws) {
  const SystemSpec& system = problem.system;
  const int dx = system.state_dim;
  const int horizon = problem.horizon();
  const auto index_map =
      IndexMap::build(static_cast<int>(locations.size()), problem.num_tasks(), horizon);
  const auto width = static_cast<std::size_t>(2 * dx);
  if (draws.size() != index_map.total() * width)
    throw InputShapeError("rollout_one: draws do not match the index map");

  auto zeta = [&](std::size_t n) {
    return Eigen::Map<const Vector>(draws.data() + n * width, 2 * dx);
  };

  RolloutResult result{.measurement_locations = {},
                       .measurement_values = {},
                       .trajectories = {},
                       .controller_gp = problem.prior_gp};
  MultiGP sampler = problem.prior_gp;
  const double observation_noise = problem.prior_gp.params().noise_variance;
  std::size_t n = 0;
  int task_index = -1;
  int step = -1;

  try {
    // Hypothetical measurements: one consistent draw per location.
    for (const Vector& location : locations) {
      const Vector z = zeta(n);
      auto [g, next] = std::move(sampler).sample_eval(location, z.head(dx));
      sampler = std::move(next);
      const Vector residual = g + system.noise_scale * z.tail(dx);
      result.measurement_locations.push_back(location);
      result.measurement_values.push_back(system.known_dynamics(location) + residual);
      result.controller_gp = std::move(result.controller_gp).condition(location, residual,
                                                                       observation_noise);
      ++n;
    }

    // Closed-loop trajectories; the sampler keeps growing across tasks.
    result.trajectories.resize(problem.tasks.size());
    for (std::size_t j = 0; j < problem.tasks.size(); ++j) {
      const TaskSpec& task = problem.tasks[j];
      task_index = static_cast<int>(j);
      auto& path = result.trajectories[j];
      path.reserve(static_cast<std::size_t>(horizon + 1));
      Vector x = task.initial_state;
      for (int t = 0; t <= horizon; ++t) {
        step = t;
        const Vector u = task.control_law(x, result.controller_gp, t);
        const Vector aug = augment(x, u);
        if (diverged(aug)) {
          result.failed = true;
          result.failure = "state diverged";
          break;
        }
        path.push_back(aug);
        const Vector z = zeta(n);
        auto [g, next] = std::move(sampler).sample_eval(aug, z.head(dx));
        sampler = std::move(next);
        x = system.known_dynamics(aug) + g + system.noise_scale * z.tail(dx);
        ++n;
      }
      if (result.failed) break;
    }
  } catch (const std::exception& e) {
    result.failed = true;
    result.failure = e.what();
  }
  if (result.failed) {
    result.failed_task = task_index;
    result.failed_step = step;
  }
  result.draws_consumed = n;
  return result;
}

}  // namespace dsml
