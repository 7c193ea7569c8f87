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

#include "doctest.h"
#include "dsml/errors.hpp"
#include "dsml/planner.hpp"
#include "fixtures.hpp"

using namespace dsml;
using namespace dsml::testing;

namespace {

Problem constant_problem(double value) {
  return Problem{scalar_system(0.5, 0.2),
                 {scalar_task(zero_input(), constant_constraint(value), 4, 0.5)},
                 MultiGP(KernelParams{1.0, {1.0}, 0.04, {0}}, 1)};
}

PlannerConfig small_config(std::uint64_t seed) {
  PlannerConfig c;
  c.samples = 200;
  c.max_N = 3;
  c.restarts = 3;
  c.optimizer.max_iterations = 30;
  c.region = {Vector{{-2.0, -2.0}}, Vector{{2.0, 2.0}}};
  c.seed = seed;
  return c;
}

SampleBatch batch_for(const Problem& problem, int N, int M, std::uint64_t seed) {
  const auto map = IndexMap::build(N, problem.num_tasks(), problem.horizon());
  return generate_batch(seed, M, map, problem.system.state_dim);
}

}  // namespace

TEST_CASE("config validation") {
  PlannerConfig c = small_config(1);
  CHECK_NOTHROW(c.validate(2));
  CHECK_THROWS_AS(c.validate(3), ConfigError);
  for (double d : {0.0, 1.0, -0.1, 1.5}) {
    PlannerConfig bad = c;
    bad.delta = d;
    CHECK_THROWS_AS(bad.validate(2), ConfigError);
  }
  PlannerConfig bad = c;
  bad.samples = 0;
  CHECK_THROWS_AS(bad.validate(2), ConfigError);
  bad = c;
  bad.max_N = 0;
  CHECK_THROWS_AS(bad.validate(2), ConfigError);
  bad = c;
  bad.restarts = 0;
  CHECK_THROWS_AS(bad.validate(2), ConfigError);
  bad = c;
  bad.optimizer.step_size = 0.0;
  CHECK_THROWS_AS(bad.validate(2), ConfigError);
  bad = c;
  bad.region.upper[0] = -3.0;
  CHECK_THROWS_AS(bad.validate(2), ConfigError);
}

TEST_CASE("trivially satisfiable: first start returns with C = 1") {
  const Problem p = constant_problem(-1.0);
  const PlannerConfig c = small_config(3);
  const LocationOptimum opt = optimize_locations(1, p, batch_for(p, 1, 50, 9), c);
  CHECK(opt.estimate.value == 1.0);
  CHECK(opt.start == 0);
  CHECK(opt.traces.size() == 1);
  REQUIRE(opt.locations.size() == 1);
  CHECK(c.region.contains(opt.locations[0]));
  // the input coordinate is not read by the GP and stays at the center
  CHECK(opt.locations[0][1] == 0.0);
}

TEST_CASE("tracking fixture: location lands on the reference") {
  TrackingFixture fx;
  const double oracle = fx.grid_optimum();
  CHECK(oracle == doctest::Approx(fx.reference).epsilon(1e-3));
  const Problem p = fx.problem();
  PlannerConfig c = small_config(5);
  c.region = fx.region();
  c.samples = 2000;
  c.optimizer.max_iterations = 100;
  const LocationOptimum opt = optimize_locations(1, p, batch_for(p, 1, 2000, 77), c);
  REQUIRE(opt.locations.size() == 1);
  CHECK(std::abs(opt.locations[0][0] - oracle) < 0.1);
  CHECK(fx.probability(opt.locations[0][0]) > fx.probability(oracle) - 0.01);
  for (const auto& trace : opt.traces) {
    CHECK(trace.N == 1);
    for (std::size_t i = 1; i < trace.surrogate.size(); ++i)
      CHECK(trace.surrogate[i] < trace.surrogate[i - 1]);
  }
}

TEST_CASE("optimize_locations is deterministic") {
  TrackingFixture fx;
  const Problem p = fx.problem();
  PlannerConfig c = small_config(8);
  c.region = fx.region();
  const auto batch = batch_for(p, 2, 300, 4);
  const LocationOptimum a = optimize_locations(2, p, batch, c);
  const LocationOptimum b = optimize_locations(2, p, batch, c);
  REQUIRE(a.locations.size() == 2);
  CHECK(a.locations == b.locations);
  CHECK(a.estimate.indicators == b.estimate.indicators);
  CHECK(a.surrogate == b.surrogate);
  CHECK(a.start == b.start);
}

TEST_CASE("selection picks the best start") {
  TrackingFixture fx;
  const Problem p = fx.problem();
  PlannerConfig c = small_config(12);
  c.region = fx.region();
  c.restarts = 5;
  c.optimizer.max_iterations = 2;
  const LocationOptimum opt = optimize_locations(1, p, batch_for(p, 1, 400, 6), c);
  REQUIRE(opt.traces.size() == 5);
  const auto& chosen = opt.traces[static_cast<std::size_t>(opt.start)];
  CHECK(chosen.satisfaction == opt.estimate.value);
  for (const auto& t : opt.traces) {
    CHECK(t.satisfaction <= chosen.satisfaction);
    if (t.satisfaction == chosen.satisfaction && t.start < opt.start)
      CHECK(t.surrogate.back() > opt.surrogate);
  }
}

TEST_CASE("plan: prior already sufficient gives N = 0") {
  const Problem p = constant_problem(-1.0);
  const PlanResult r = plan(p, small_config(2));
  CHECK(r.N_final == 0);
  CHECK(r.locations.empty());
  CHECK(r.terminated_by == Termination::Satisfied);
  REQUIRE(r.satisfaction_history.size() == 1);
  CHECK(r.satisfaction_history[0] == HistoryEntry{0, 1.0});
  CHECK(r.traces.empty());
}

TEST_CASE("plan: impossible constraints hit the cap") {
  const Problem p = constant_problem(1.0);
  const PlanResult r = plan(p, small_config(2));
  CHECK(r.terminated_by == Termination::Cap);
  CHECK(r.N_final == 3);
  REQUIRE(r.satisfaction_history.size() == 4);
  for (int n = 0; n < 4; ++n)
    CHECK(r.satisfaction_history[static_cast<std::size_t>(n)] == HistoryEntry{n, 0.0});
  CHECK(r.locations.size() == 3);
  CHECK(r.traces.size() == 3);
}

TEST_CASE("plan: loop contract and strict satisfaction") {
  TrackingFixture fx;
  fx.bound = 0.35;
  const Problem p = fx.problem();
  PlannerConfig c = small_config(31);
  c.region = fx.region();
  c.delta = 0.05;
  c.max_N = 4;
  const PlanResult r = plan(p, c);
  REQUIRE(r.terminated_by == Termination::Satisfied);
  CHECK(r.satisfaction_history.size() == static_cast<std::size_t>(r.N_final) + 1);
  for (std::size_t i = 0; i < r.satisfaction_history.size(); ++i)
    CHECK(r.satisfaction_history[i].N == static_cast<int>(i));
  CHECK(r.N_final >= 1);
  CHECK(r.satisfaction_history.back().satisfaction > 1.0 - c.delta);
  for (std::size_t i = 0; i + 1 < r.satisfaction_history.size(); ++i)
    CHECK(r.satisfaction_history[i].satisfaction <= 1.0 - c.delta);
  REQUIRE(r.locations.size() == static_cast<std::size_t>(r.N_final));
  const auto batch = batch_for(p, r.N_final, c.samples, batch_seed(c.seed, r.N_final));
  CHECK(estimate_satisfaction(r.locations, p, batch).value ==
        r.satisfaction_history.back().satisfaction);
}

TEST_CASE("plan is bit-reproducible and seed-sensitive") {
  TrackingFixture fx;
  const Problem p = fx.problem();
  PlannerConfig c = small_config(99);
  c.region = fx.region();
  c.max_N = 2;
  c.delta = 0.001;
  const PlanResult a = plan(p, c);
  const PlanResult b = plan(p, c);
  CHECK(a.locations == b.locations);
  CHECK(a.satisfaction_history == b.satisfaction_history);
  REQUIRE(a.traces.size() == b.traces.size());
  for (std::size_t i = 0; i < a.traces.size(); ++i)
    for (std::size_t s = 0; s < a.traces[i].size(); ++s)
      CHECK(a.traces[i][s].surrogate == b.traces[i][s].surrogate);
  c.seed = 100;
  const PlanResult other = plan(p, c);
  CHECK(other.satisfaction_history != a.satisfaction_history);
}

TEST_CASE("batch seeds differ per N") {
  CHECK(batch_seed(1, 0) != batch_seed(1, 1));
  CHECK(batch_seed(1, 3) == batch_seed(1, 3));
  CHECK(batch_seed(1, 3) != batch_seed(2, 3));
}

TEST_CASE("warm start keeps the previous optimum and screens the new point") {
  TrackingFixture fx;
  const Problem p = fx.problem();
  PlannerConfig c = small_config(21);
  c.region = fx.region();
  c.restarts = 1;
  c.warm_start = true;
  c.optimizer.max_iterations = 0;
  const CandidateLocations previous{Vector{{1.3, -0.2}}};
  const auto batch = batch_for(p, 2, 300, 8);

  const LocationOptimum plain = optimize_locations(2, p, batch, c, previous);
  REQUIRE(plain.locations.size() == 2);
  CHECK(plain.locations[0] == previous[0]);
  CHECK(plain.locations[1][1] == 0.0);

  c.warm_start_candidates = 12;
  const LocationOptimum screened = optimize_locations(2, p, batch, c, previous);
  CHECK(screened.locations[0] == previous[0]);
  CHECK(screened.traces[0].surrogate.front() <= plain.traces[0].surrogate.front());
  CHECK(screened.traces[0].surrogate.front() ==
        surrogate(screened.locations, p, batch).value);
  // The first candidate is the unscreened draw, so screening never loses.
  c.warm_start_candidates = 1;
  CHECK(optimize_locations(2, p, batch, c, previous).locations == plain.locations);

  // Without a matching previous optimum every point is drawn fresh.
  const LocationOptimum cold = optimize_locations(2, p, batch, c, {});
  CHECK(cold.locations[0] != previous[0]);

  c.warm_start_candidates = 0;
  CHECK_THROWS_AS(c.validate(2), ConfigError);
}
