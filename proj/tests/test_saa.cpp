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

#include <algorithm>
#include <cmath>
#include <numeric>

#include "doctest.h"
#include "dsml/saa.hpp"
#include "fixtures.hpp"

using namespace dsml;
using namespace dsml::testing;

namespace {

SampleBatch batch_for(const Problem& problem, int N, int M, std::uint64_t seed) {
  const auto map = IndexMap::build(N, problem.num_tasks(), problem.horizon());
  return generate_batch(seed, M, map, problem.system.state_dim);
}

Problem constant_problem(double value, int horizon) {
  return Problem{scalar_system(1.0, 0.5),
                 {scalar_task(zero_input(), constant_constraint(value), horizon, 0.0),
                  scalar_task(gain_input(0.5), constant_constraint(value), horizon, 1.0)},
                 MultiGP(KernelParams{1.0, {1.0}, 0.01, {0}}, 1)};
}

// h = (x - r)^2 + 0.1 > 0 everywhere, so the hinge is smooth in the locations.
Problem smooth_problem() {
  TrackingFixture fx;
  Problem p = fx.problem();
  p.tasks.front().horizon = 2;
  p.tasks.front().constraints = [](const Vector& aug, int) -> Vector {
    return Vector::Constant(1, (aug[0] - 0.8) * (aug[0] - 0.8) + 0.1);
  };
  return p;
}

double log_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const auto n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

TEST_CASE("constant constraints") {
  const CandidateLocations locs{Vector{{0.2, 0.0}}};
  SUBCASE("always satisfied") {
    const Problem p = constant_problem(-1.0, 3);
    const auto batch = batch_for(p, 1, 40, 3);
    const Evaluation ev = evaluate(locs, p, batch);
    CHECK(ev.estimate.value == 1.0);
    CHECK(ev.surrogate == 0.0);
    CHECK(ev.estimate.violation_profile.isZero(0.0));
    const SurrogateValue s = surrogate(locs, p, batch, true);
    CHECK(s.value == 0.0);
    REQUIRE(s.gradient);
    CHECK(s.gradient->isZero(0.0));
  }
  SUBCASE("always violated") {
    const Problem p = constant_problem(1.0, 3);
    const auto batch = batch_for(p, 1, 40, 3);
    const Evaluation ev = evaluate(locs, p, batch);
    CHECK(ev.estimate.value == 0.0);
    CHECK(ev.estimate.failures == 0);
    // two tasks x three constrained steps
    CHECK(ev.surrogate == doctest::Approx(6.0).epsilon(1e-15));
    REQUIRE(ev.estimate.violation_profile.rows() == 2);
    REQUIRE(ev.estimate.violation_profile.cols() == 3);
    CHECK((ev.estimate.violation_profile.array() == 1.0).all());
  }
}

TEST_CASE("estimate is the mean of the indicators") {
  const Problem p = gaussian_calibration_problem();
  const auto batch = batch_for(p, 0, 997, 12);
  const SAAEstimate est = estimate_satisfaction({}, p, batch);
  REQUIRE(est.indicators.size() == 997);
  const int ones = std::accumulate(est.indicators.begin(), est.indicators.end(), 0);
  CHECK(est.value == static_cast<double>(ones) / 997.0);
  CHECK(est.value >= 0.0);
  CHECK(est.value <= 1.0);
}

TEST_CASE("calibration against the Gaussian closed form") {
  const Problem p = gaussian_calibration_problem();
  const double prob = gaussian_calibration_probability();
  CHECK(prob == doctest::Approx(0.9545).epsilon(1e-4));
  constexpr int M = 10000;
  const double tol = 3.0 * std::sqrt(prob * (1.0 - prob) / M);
  int inside = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const double c = estimate_satisfaction({}, p, batch_for(p, 0, M, seed)).value;
    if (std::abs(c - prob) < tol) ++inside;
  }
  CHECK(inside >= 4);
}

TEST_CASE("surrogate definition") {
  SUBCASE("single sample, single step, h = 0.7") {
    // x_1 = x_0 with no noise and a vanishing GP; |x_1| - 2 = 0.7.
    const Problem p{scalar_system(1.0, 0.0),
                    {scalar_task(zero_input(), abs_bound(0.0, 2.0), 1, 2.7)},
                    MultiGP(KernelParams{1e-24, {1.0}, 0.0, {0}}, 1)};
    const Evaluation ev = evaluate({}, p, batch_for(p, 0, 1, 9));
    CHECK(ev.surrogate == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(ev.estimate.value == 0.0);
    CHECK(surrogate({}, p, batch_for(p, 0, 1, 9)).value == ev.surrogate);
  }
  SUBCASE("per-sample values average to the surrogate") {
    const Problem p = smooth_problem();
    const auto batch = batch_for(p, 2, 30, 5);
    const Evaluation ev = evaluate({Vector{{0.1, 0.0}}, Vector{{1.2, 0.0}}}, p, batch);
    double sum = 0.0;
    for (double v : ev.per_sample_surrogate) sum += v;
    CHECK(ev.surrogate == doctest::Approx(sum / 30.0).epsilon(1e-14));
  }
}

TEST_CASE("surrogate gradient agrees with one-sided differences") {
  const Problem p = smooth_problem();
  const auto batch = batch_for(p, 2, 25, 17);
  const CandidateLocations locs{Vector{{0.1, 0.3}}, Vector{{1.4, -0.2}}};
  const SurrogateValue s = surrogate(locs, p, batch, true);
  REQUIRE(s.gradient);
  REQUIRE(s.gradient->size() == 4);
  CHECK(s.value > 0.0);
  // the GP reads x only; the input coordinate is inactive
  CHECK((*s.gradient)[1] == 0.0);
  CHECK((*s.gradient)[3] == 0.0);
  constexpr double h = 1e-5;
  for (int idx : {0, 2}) {
    CandidateLocations moved = locs;
    moved[static_cast<std::size_t>(idx / 2)][idx % 2] += h;
    const double fd = (surrogate(moved, p, batch).value - s.value) / h;
    CHECK(std::abs(fd) > 1e-4);
    CHECK(std::abs((*s.gradient)[idx] - fd) <= 1e-2 * std::abs(fd));
  }
  CHECK(active_coordinates(p) == std::vector<int>{0});
}

TEST_CASE("indicator dominance") {
  TrackingFixture fx;
  const Problem p = fx.problem();
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    const auto batch = batch_for(p, 1, 500, seed);
    const Evaluation ev = evaluate({Vector{{0.3 * static_cast<double>(seed) - 0.5, 0.0}}}, p, batch);
    int positive = 0;
    for (std::size_t m = 0; m < 500; ++m) {
      const bool violating = ev.per_sample_surrogate[m] > 0.0;
      CHECK(violating == (ev.estimate.indicators[m] == 0));
      positive += violating;
    }
    CHECK(ev.estimate.value >= 1.0 - positive / 500.0);
    CHECK(ev.estimate.value > 0.0);
    CHECK(ev.estimate.value < 1.0);
  }
}

TEST_CASE("repeated evaluation is bit-stable") {
  TrackingFixture fx;
  const Problem p = fx.problem();
  const auto batch = batch_for(p, 1, 300, 44);
  const CandidateLocations locs{Vector{{0.37, 1.0}}};
  const Evaluation a = evaluate(locs, p, batch);
  const Evaluation b = evaluate(locs, p, batch);
  CHECK(a.estimate.value == b.estimate.value);
  CHECK(a.estimate.indicators == b.estimate.indicators);
  CHECK(a.surrogate == b.surrogate);
  CHECK(a.per_sample_surrogate == b.per_sample_surrogate);
  CHECK(a.estimate.violation_profile == b.estimate.violation_profile);
}

TEST_CASE("estimate matches the closed form for the tracking fixture") {
  TrackingFixture fx;
  const Problem p = fx.problem();
  constexpr int M = 20000;
  for (double loc : {-1.0, 0.3, 0.8}) {
    const double prob = fx.probability(loc);
    const double c = estimate_satisfaction({Vector{{loc, 0.0}}}, p, batch_for(p, 1, M, 101)).value;
    CHECK(std::abs(c - prob) < 4.0 * std::sqrt(prob * (1.0 - prob) / M));
  }
}

TEST_CASE("error shrinks like M^-1/2") {
  const Problem p = gaussian_calibration_problem();
  const double prob = gaussian_calibration_probability();
  const std::vector<double> sizes{100, 1000, 10000};
  std::vector<double> errors;
  for (double M : sizes) {
    double total = 0.0;
    for (std::uint64_t seed = 1; seed <= 40; ++seed) {
      const auto batch = batch_for(p, 0, static_cast<int>(M), 1000 * seed + 7);
      total += std::abs(estimate_satisfaction({}, p, batch).value - prob);
    }
    errors.push_back(total / 40.0);
  }
  const double slope = log_slope(sizes, errors);
  CHECK(slope >= -0.7);
  CHECK(slope <= -0.3);
}
