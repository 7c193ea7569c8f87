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

#include <cmath>
#include <random>
#include <set>

#include "doctest.h"
#include "dsml/errors.hpp"
#include "dsml/rollout.hpp"
#include "fixtures.hpp"

using namespace dsml;
using namespace dsml::testing;

namespace {

using Kind = IndexEntry::Kind;

std::vector<double> zeros(std::size_t n) { return std::vector<double>(n, 0.0); }

}  // namespace

TEST_CASE("index map: trajectories only") {
  const auto map = IndexMap::build(0, 1, 2);
  REQUIRE(map.total() == 3);
  for (int t = 0; t < 3; ++t) CHECK(map[static_cast<std::size_t>(t)] == IndexEntry{Kind::Trajectory, 0, 1, t});
}

TEST_CASE("index map: demo scale") {
  const auto map = IndexMap::build(2, 3, 100);
  CHECK(map.total() == 305);
  CHECK(map[2] == IndexEntry{Kind::Trajectory, 0, 1, 0});
  CHECK(map[1] == IndexEntry{Kind::Measurement, 2, 0, 0});
}

TEST_CASE("index map: hand enumeration") {
  const auto map = IndexMap::build(1, 2, 1);
  REQUIRE(map.total() == 5);
  CHECK(map[0] == IndexEntry{Kind::Measurement, 1, 0, 0});
  CHECK(map[1] == IndexEntry{Kind::Trajectory, 0, 1, 0});
  CHECK(map[2] == IndexEntry{Kind::Trajectory, 0, 1, 1});
  CHECK(map[3] == IndexEntry{Kind::Trajectory, 0, 2, 0});
  CHECK(map[4] == IndexEntry{Kind::Trajectory, 0, 2, 1});
}

TEST_CASE("index map rejects empty task sets and horizons") {
  CHECK_THROWS_AS(IndexMap::build(3, 0, 5), ConfigError);
  CHECK_THROWS_AS(IndexMap::build(3, 2, 0), ConfigError);
  CHECK_THROWS_AS(IndexMap::build(-1, 2, 5), ConfigError);
}

TEST_CASE("index map is a bijection matching the ceiling formula") {
  std::mt19937_64 gen(2);
  std::uniform_int_distribution<int> pick(0, 12);
  for (int trial = 0; trial < 100; ++trial) {
    const int N = pick(gen);
    const int L = 1 + pick(gen) % 5;
    const int H = 1 + pick(gen);
    const auto map = IndexMap::build(N, L, H);
    REQUIRE(map.total() == static_cast<std::size_t>(N + L * (H + 1)));
    std::set<std::pair<int, int>> seen;
    for (std::size_t n = 0; n < map.total(); ++n) {
      const auto& e = map[n];
      const int idx = static_cast<int>(n);
      if (idx < N) {
        CHECK(e == IndexEntry{Kind::Measurement, idx + 1, 0, 0});
        continue;
      }
      // 1-based sequence position p = n + 1 gives j = ceil((p - N) / (H + 1)).
      const int p = idx + 1;
      const int j = (p - N + H) / (H + 1);
      const int t = p - N - (j - 1) * (H + 1) - 1;
      CHECK(e.kind == Kind::Trajectory);
      CHECK(e.task == j);
      CHECK(e.step == t);
      CHECK(map.trajectory_index(e.task, e.step) == n);
      CHECK(seen.insert({e.task, e.step}).second);
    }
    CHECK(seen.size() == static_cast<std::size_t>(L * (H + 1)));
  }
}

TEST_CASE("sample batches are reproducible and seed-sensitive") {
  const auto map = IndexMap::build(2, 3, 100);
  const auto a = generate_batch(7, 100, map, 2);
  const auto b = generate_batch(7, 100, map, 2);
  const auto c = generate_batch(8, 100, map, 2);
  CHECK(a.samples() == 100);
  CHECK(a.sequence_length() == 305);
  CHECK(a.draws().size() == 100u * 305u * 4u);
  CHECK(std::equal(a.draws().begin(), a.draws().end(), b.draws().begin()));
  std::size_t differ = 0;
  for (std::size_t i = 0; i < a.draws().size(); ++i) differ += a.draws()[i] != c.draws()[i];
  CHECK(differ > a.draws().size() * 99 / 100);

  double sum = 0.0;
  double sum_sq = 0.0;
  for (double z : a.draws()) {
    sum += z;
    sum_sq += z * z;
  }
  const auto n = static_cast<double>(a.draws().size());
  const double mean = sum / n;
  const double var = sum_sq / n - mean * mean;
  CHECK(std::abs(mean) < 4.0 / std::sqrt(n));
  CHECK(std::abs(var - 1.0) < 4.0 * std::sqrt(2.0 / n));
  CHECK_THROWS_AS(generate_batch(1, 0, map, 2), ConfigError);
}

TEST_CASE("noise-free fixed point stays put") {
  SystemSpec system = scalar_system(1.0, 0.0);
  system.state_dim = 2;
  system.input_dim = 1;
  system.known_dynamics = [](const Vector& aug) -> Vector { return aug.head(2); };
  system.noise_scale = Matrix::Zero(2, 2);
  system.gp_input_projection = {0, 1};
  auto law = [](const Vector&, const MultiGP&, int) -> Vector { return Vector::Zero(1); };
  TaskSpec a{1, law, constant_constraint(-1.0), 1, 4, Vector{{0.5, -1.0}}};
  TaskSpec b{2, law, constant_constraint(-1.0), 1, 4, Vector{{2.0, 0.25}}};
  const Problem problem{system, {a, b}, MultiGP(KernelParams{1.0, {1.0, 1.0}, 0.0, {0, 1}}, 2)};
  const auto result = rollout_one({}, problem, zeros(2 * 5 * 4));
  REQUIRE_FALSE(result.failed);
  for (std::size_t j = 0; j < 2; ++j) {
    REQUIRE(result.trajectories[j].size() == 5);
    for (const auto& aug : result.trajectories[j])
      CHECK((aug.head(2) - problem.tasks[j].initial_state).norm() == 0.0);
  }
}

TEST_CASE("degenerate GP reproduces the linear-Gaussian rollout") {
  const double q = 0.3;
  const double gain = 0.5;
  const int horizon = 6;
  const Problem problem{scalar_system(1.0, q),
                        {scalar_task(gain_input(gain), constant_constraint(-1.0), horizon, 1.5)},
                        MultiGP(KernelParams{1e-24, {1.0}, 0.0, {0}}, 1)};
  const CandidateLocations locations{Vector{{0.2, 0.0}}, Vector{{-0.7, 0.0}}};
  const auto map = IndexMap::build(2, 1, horizon);
  const auto batch = generate_batch(42, 1, map, 1);
  const auto draws = batch.sample(0);
  const auto result = rollout_one(locations, problem, draws);
  REQUIRE_FALSE(result.failed);
  CHECK(result.draws_consumed == map.total());

  double x = 1.5;
  for (int t = 0; t <= horizon; ++t) {
    const auto& aug = result.trajectories[0][static_cast<std::size_t>(t)];
    CHECK(std::abs(aug[0] - x) < 1e-10);
    CHECK(std::abs(aug[1] + gain * x) < 1e-10);
    const std::size_t n = map.trajectory_index(1, t);
    x = (1.0 - gain) * x + q * draws[2 * n + 1];
  }
  // Hypothetical measurements: known part plus Q times the noise draw.
  for (std::size_t i = 0; i < 2; ++i) {
    const double expected = locations[i][0] + q * draws[2 * i + 1];
    CHECK(std::abs(result.measurement_values[i][0] - expected) < 1e-10);
  }
}

TEST_CASE("sampled dynamics behave as one function") {
  // Two identical tasks: the second revisits every point of the first, so
  // it must reproduce the same path although it consumes other draws.
  const Problem problem{scalar_system(0.0, 0.0),
                        {scalar_task(zero_input(), constant_constraint(-1.0), 5, 0.3),
                         scalar_task(zero_input(), constant_constraint(-1.0), 5, 0.3)},
                        MultiGP(KernelParams{1.0, {0.7}, 0.0, {0}}, 1)};
  const auto map = IndexMap::build(1, 2, 5);
  const auto batch = generate_batch(5, 1, map, 1);
  const auto result = rollout_one({Vector{{-0.4, 0.0}}}, problem, batch.sample(0));
  REQUIRE_FALSE(result.failed);
  for (std::size_t t = 0; t < 6; ++t)
    CHECK(std::abs(result.trajectories[0][t][0] - result.trajectories[1][t][0]) < 1e-8);
}

TEST_CASE("rollouts are deterministic and consume every draw once") {
  TrackingFixture fx;
  const Problem problem = fx.problem();
  const CandidateLocations locations{Vector{{0.5, 0.0}}};
  const auto map = IndexMap::build(1, 1, 1);
  const auto batch = generate_batch(3, 2, map, 1);
  const auto a = rollout_one(locations, problem, batch.sample(1));
  const auto b = rollout_one(locations, problem, batch.sample(1));
  CHECK(a.draws_consumed == map.total());
  CHECK(a.trajectories[0][1] == b.trajectories[0][1]);
  CHECK(a.controller_gp.size() == 1);
  CHECK_THROWS_AS(rollout_one(locations, problem, batch.sample(1).subspan(1)), InputShapeError);
}

TEST_CASE("divergence is reported, not thrown") {
  const Problem problem{scalar_system(10.0, 0.0),
                        {scalar_task(zero_input(), constant_constraint(-1.0), 20, 1.0)},
                        MultiGP(KernelParams{1e-24, {1.0}, 0.0, {0}}, 1)};
  const auto map = IndexMap::build(0, 1, 20);
  const auto result = rollout_one({}, problem, zeros(map.total() * 2));
  CHECK(result.failed);
  CHECK(result.failed_task == 0);
  CHECK(result.failed_step == 7);
  CHECK(result.trajectories[0].size() == 7);
}

TEST_CASE("terminal-state expectation and spread match the analytic rollout") {
  // The GP reads only the input, which is identically zero, so the whole
  // trajectory sees one shared random offset c ~ N(0, sf2):
  //   x_{t+1} = a x_t + c + q w_t.
  const double a = 0.8;
  const double q = 0.2;
  const double sf2 = 0.25;
  const int horizon = 5;
  const double x0 = 1.0;
  SystemSpec system = scalar_system(a, q);
  system.gp_input_projection = {1};
  const Problem problem{system,
                        {scalar_task(zero_input(), constant_constraint(-1.0), horizon, x0)},
                        MultiGP(KernelParams{sf2, {1.0}, 0.0, {1}}, 1)};
  const auto map = IndexMap::build(0, 1, horizon);
  const int samples = 10000;
  const auto batch = generate_batch(77, samples, map, 1);
  double sum = 0.0;
  double sum_sq = 0.0;
  for (int m = 0; m < samples; ++m) {
    const auto r = rollout_one({}, problem, batch.sample(m));
    const double x = r.trajectories[0].back()[0];
    sum += x;
    sum_sq += x * x;
  }
  const double mean = sum / samples;
  const double var = sum_sq / samples - mean * mean;
  double geometric = 0.0;
  double geometric_sq = 0.0;
  for (int k = 0; k < horizon; ++k) {
    geometric += std::pow(a, k);
    geometric_sq += std::pow(a, 2 * k);
  }
  const double expected_mean = std::pow(a, horizon) * x0;
  const double expected_var = sf2 * geometric * geometric + q * q * geometric_sq;
  CHECK(std::abs(mean - expected_mean) < 3.0 * std::sqrt(expected_var / samples));
  CHECK(std::abs(var - expected_var) < 3.0 * expected_var * std::sqrt(2.0 / samples));
}
