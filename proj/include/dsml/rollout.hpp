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

// Consistent sampling of hypothetical measurements and closed-loop
// trajectories from one GP function draw.

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dsml/gp.hpp"
#include "dsml/system.hpp"

namespace dsml {

/// Entry n of the combined measurement/trajectory sequence.
/// Measurement indices and task ids are 1-based, time steps 0-based.
struct IndexEntry {
  enum class Kind { Measurement, Trajectory };
  Kind kind = Kind::Measurement;
  int measurement = 0;
  int task = 0;
  int step = 0;

  bool operator==(const IndexEntry&) const = default;
};

class IndexMap {
 public:
  /// Throws ConfigError unless tasks >= 1, horizon >= 1, measurements >= 0.
  static IndexMap build(int measurements, int tasks, int horizon);

  int measurements() const { return measurements_; }
  int tasks() const { return tasks_; }
  int horizon() const { return horizon_; }
  /// N + L (H + 1).
  std::size_t total() const { return entries_.size(); }
  const IndexEntry& operator[](std::size_t n) const { return entries_[n]; }
  /// Sequence index of (task, step), task 1-based.
  std::size_t trajectory_index(int task, int step) const;

 private:
  int measurements_ = 0;
  int tasks_ = 0;
  int horizon_ = 0;
  std::vector<IndexEntry> entries_;
};

/// M x N_tilde x 2 d_x standard normals. Entry (m, n) holds the GP draw in
/// its first d_x components and the process-noise draw in the rest.
class SampleBatch {
 public:
  SampleBatch(std::uint64_t seed, int samples, std::size_t sequence_length, int state_dim,
              std::vector<double> draws);

  std::uint64_t seed() const { return seed_; }
  int samples() const { return samples_; }
  std::size_t sequence_length() const { return sequence_length_; }
  int state_dim() const { return state_dim_; }
  std::span<const double> draws() const { return draws_; }

  /// All draws for sample m (sequence_length x 2 d_x).
  std::span<const double> sample(int m) const;
  /// The 2 d_x draws for (m, n).
  std::span<const double> draw(int m, std::size_t n) const;

 private:
  std::uint64_t seed_;
  int samples_;
  std::size_t sequence_length_;
  int state_dim_;
  std::vector<double> draws_;
};

/// Fills the batch from Rng(seed) in (m, n, component) order.
SampleBatch generate_batch(std::uint64_t seed, int samples, const IndexMap& index_map,
                           int state_dim);

struct RolloutResult {
  /// Hypothetical data set: locations and sampled measured next states.
  CandidateLocations measurement_locations;
  std::vector<Vector> measurement_values;
  /// Per task, augmented states for t = 0..H (shorter if the rollout failed).
  std::vector<std::vector<Vector>> trajectories;
  /// Prior GP conditioned on the hypothetical data set; drives the control laws.
  MultiGP controller_gp;
  bool failed = false;
  /// 0-based task and time step at which the failure happened.
  int failed_task = -1;
  int failed_step = -1;
  std::string failure = {};
  /// Number of 2 d_x draws used; equals N_tilde for a complete rollout.
  std::size_t draws_consumed = 0;
};

/// Any state with a larger norm aborts the rollout.
inline constexpr double kDivergenceNorm = 1e6;

/// Rolls out sample m. `draws` are that sample's N_tilde x 2 d_x normals.
/// GP failures and diverging states end the rollout with `failed` set; they
/// are not thrown.
RolloutResult rollout_one(const CandidateLocations& locations, const Problem& problem,
                          std::span<const double> draws);

}  // namespace dsml
