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

#include "dsml/planner.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

#include "dsml/errors.hpp"
#include "dsml/rng.hpp"

namespace dsml {

namespace {

constexpr double kMinStepFraction = 1e-6;

CandidateLocations unflatten(const Vector& flat, int dim) {
  CandidateLocations out(static_cast<std::size_t>(flat.size() / dim));
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = flat.segment(static_cast<Eigen::Index>(i) * dim, dim);
  return out;
}

Vector project_to_region(const Vector& flat, const ExplorationRegion& region) {
  const int dim = region.dim();
  Vector out = flat;
  for (Eigen::Index i = 0; i < flat.size() / dim; ++i)
    out.segment(i * dim, dim) = region.clamp(flat.segment(i * dim, dim));
  return out;
}

double surrogate_at(const Vector& flat, int dim, const Problem& problem, const SampleBatch& batch) {
  return evaluate(unflatten(flat, dim), problem, batch).surrogate;
}

Vector gradient_at(const Vector& flat, int dim, const Problem& problem, const SampleBatch& batch) {
  Vector gradient = Vector::Zero(flat.size());
  const auto coords = active_coordinates(problem);
  for (Eigen::Index i = 0; i < flat.size() / dim; ++i) {
    for (int c : coords) {
      Vector plus = flat;
      Vector minus = flat;
      plus[i * dim + c] += kGradientStep;
      minus[i * dim + c] -= kGradientStep;
      gradient[i * dim + c] = (surrogate_at(plus, dim, problem, batch) -
                               surrogate_at(minus, dim, problem, batch)) /
                              (2.0 * kGradientStep);
    }
  }
  return gradient;
}

struct StartResult {
  Vector flat;
  Evaluation evaluation;
  OptimizerTrace trace;
};

StartResult descend(Vector flat, const Problem& problem, const SampleBatch& batch,
                    const PlannerConfig& config) {
  const int dim = problem.system.augmented_dim();
  const OptimizerSettings& opt = config.optimizer;
  StartResult out;
  double value = surrogate_at(flat, dim, problem, batch);
  out.trace.surrogate.push_back(value);
  double step = opt.step_size;
  for (int it = 0; it < opt.max_iterations && value > 0.0; ++it) {
    const Vector gradient = gradient_at(flat, dim, problem, batch);
    const double scale = gradient.cwiseAbs().maxCoeff();
    if (!(scale > 0.0)) break;
    const Vector direction = gradient / scale;
    bool accepted = false;
    while (step >= kMinStepFraction * opt.step_size) {
      const Vector candidate = project_to_region(flat - step * direction, config.region);
      if (candidate == flat) break;
      const double trial = surrogate_at(candidate, dim, problem, batch);
      if (trial < value) {
        flat = candidate;
        value = trial;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
    ++out.trace.iterations;
    out.trace.surrogate.push_back(value);
    step = std::min(2.0 * step, opt.step_size);
    const auto& hist = out.trace.surrogate;
    if (static_cast<int>(hist.size()) > opt.patience &&
        hist[hist.size() - 1 - static_cast<std::size_t>(opt.patience)] - value < opt.tolerance)
      break;
  }
  out.evaluation = evaluate(unflatten(flat, dim), problem, batch);
  out.trace.satisfaction = out.evaluation.estimate.value;
  out.trace.failures = out.evaluation.estimate.failures;
  out.flat = std::move(flat);
  return out;
}

bool better(const StartResult& a, const StartResult& b) {
  const double ca = a.evaluation.estimate.value;
  const double cb = b.evaluation.estimate.value;
  if (ca != cb) return ca > cb;
  return a.evaluation.surrogate < b.evaluation.surrogate;
}

}  // namespace

void PlannerConfig::validate(int augmented_dim) const {
  if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("planner.delta: must lie in (0, 1)");
  if (samples < 1) throw ConfigError("planner.samples: M must be at least 1");
  if (max_N < 1) throw ConfigError("planner.max_N: must be at least 1");
  if (restarts < 1) throw ConfigError("planner.restarts: must be at least 1");
  if (!(optimizer.step_size > 0.0)) throw ConfigError("planner.optimizer.step_size: must be positive");
  if (optimizer.max_iterations < 0) throw ConfigError("planner.optimizer.max_iterations: must not be negative");
  if (!(optimizer.tolerance >= 0.0)) throw ConfigError("planner.optimizer.tolerance: must not be negative");
  if (warm_start_candidates < 1)
    throw ConfigError("planner.warm_start_candidates: must be at least 1");
  if (optimizer.patience < 1) throw ConfigError("planner.optimizer.patience: must be at least 1");
  region.validate();
  if (region.dim() != augmented_dim)
    throw ConfigError("planner.region: must cover the augmented state");
}

std::uint64_t batch_seed(std::uint64_t seed, int N) {
  return derive_seed(seed, 2 * static_cast<std::uint64_t>(N));
}

LocationOptimum optimize_locations(int N, const Problem& problem, const SampleBatch& batch,
                                   const PlannerConfig& config,
                                   const CandidateLocations& previous) {
  const int dim = problem.system.augmented_dim();
  const auto active = active_coordinates(problem);
  const std::uint64_t init_seed = derive_seed(config.seed, 2 * static_cast<std::uint64_t>(N) + 1);

  LocationOptimum best;
  std::optional<StartResult> incumbent;
  int failed_starts = 0;
  for (int start = 0; start < config.restarts; ++start) {
    Rng rng(derive_seed(init_seed, static_cast<std::uint64_t>(start)));
    Vector flat(static_cast<Eigen::Index>(N) * dim);
    int first = 0;
    auto draw = [&] {
      Vector loc = config.region.center();
      for (int c : active) loc[c] = rng.uniform(config.region.lower[c], config.region.upper[c]);
      return loc;
    };
    if (start == 0 && config.warm_start && static_cast<int>(previous.size()) == N - 1) {
      CandidateLocations locs = previous;
      locs.push_back(draw());
      double lowest = config.warm_start_candidates > 1
                          ? surrogate(locs, problem, batch).value
                          : 0.0;
      for (int k = 1; k < config.warm_start_candidates; ++k) {
        CandidateLocations trial = previous;
        trial.push_back(draw());
        const double value = surrogate(trial, problem, batch).value;
        if (value < lowest) {
          lowest = value;
          locs = std::move(trial);
        }
      }
      for (const auto& loc : locs) flat.segment(static_cast<Eigen::Index>(first++) * dim, dim) = loc;
    }
    for (int i = first; i < N; ++i) flat.segment(static_cast<Eigen::Index>(i) * dim, dim) = draw();
    StartResult result = descend(std::move(flat), problem, batch, config);
    result.trace.N = N;
    result.trace.start = start;
    best.traces.push_back(result.trace);
    if (result.evaluation.estimate.failures == batch.samples()) ++failed_starts;
    if (!incumbent || better(result, *incumbent)) {
      incumbent = std::move(result);
      best.start = start;
    }
    if (incumbent->evaluation.estimate.value == 1.0) break;
  }
  if (failed_starts == static_cast<int>(best.traces.size())) {
    std::ostringstream msg;
    msg << "planner: every rollout failed for all " << failed_starts << " starts at N = " << N;
    throw PlannerError(msg.str());
  }
  best.locations = unflatten(incumbent->flat, dim);
  best.estimate = std::move(incumbent->evaluation.estimate);
  best.surrogate = incumbent->evaluation.surrogate;
  return best;
}

PlanResult plan(const Problem& problem, const PlannerConfig& config,
                const PlanProgress& progress) {
  problem.validate();
  config.validate(problem.system.augmented_dim());
  const int dx = problem.system.state_dim;
  PlanResult result;

  auto map = IndexMap::build(0, problem.num_tasks(), problem.horizon());
  auto batch = generate_batch(batch_seed(config.seed, 0), config.samples, map, dx);
  double satisfaction = estimate_satisfaction({}, problem, batch).value;
  result.satisfaction_history.push_back({0, satisfaction});
  if (progress) progress(result.satisfaction_history.back());

  int N = 0;
  while (satisfaction <= 1.0 - config.delta && N < config.max_N) {
    ++N;
    map = IndexMap::build(N, problem.num_tasks(), problem.horizon());
    batch = generate_batch(batch_seed(config.seed, N), config.samples, map, dx);
    LocationOptimum optimum = optimize_locations(N, problem, batch, config, result.locations);
    satisfaction = optimum.estimate.value;
    result.satisfaction_history.push_back({N, satisfaction});
    if (progress) progress(result.satisfaction_history.back());
    result.traces.push_back(std::move(optimum.traces));
    result.locations = std::move(optimum.locations);
  }
  result.N_final = N;
  result.terminated_by =
      satisfaction > 1.0 - config.delta ? Termination::Satisfied : Termination::Cap;
  return result;
}

}  // namespace dsml
