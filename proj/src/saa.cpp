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

#include "dsml/saa.hpp"

#include <algorithm>
#include <cmath>

#include "dsml/errors.hpp"
#include "dsml/parallel.hpp"

namespace dsml {

namespace {

struct SampleOutcome {
  bool satisfied = true;
  double hinge = 0.0;
  std::vector<double> step_violation;  // L x H, row-major
};

SampleOutcome score(const RolloutResult& rollout, const Problem& problem) {
  const int horizon = problem.horizon();
  const auto tasks = problem.tasks.size();
  SampleOutcome out;
  out.step_violation.assign(tasks * static_cast<std::size_t>(horizon), 0.0);
  out.satisfied = !rollout.failed;
  for (std::size_t j = 0; j < tasks; ++j) {
    const TaskSpec& task = problem.tasks[j];
    const auto& path = j < rollout.trajectories.size() ? rollout.trajectories[j]
                                                       : std::vector<Vector>{};
    for (int t = 1; t <= horizon; ++t) {
      double& worst = out.step_violation[j * static_cast<std::size_t>(horizon) +
                                         static_cast<std::size_t>(t - 1)];
      if (static_cast<std::size_t>(t) >= path.size()) {
        if (!rollout.failed) throw InternalError("saa: incomplete trajectory without failure");
        out.hinge += kFailurePenalty * task.num_constraints;
        worst = kFailurePenalty;
        continue;
      }
      const Vector h = task.constraints(path[static_cast<std::size_t>(t)], t);
      for (Eigen::Index i = 0; i < h.size(); ++i) {
        if (!(h[i] <= 0.0)) out.satisfied = false;
        const double excess = std::isnan(h[i]) ? kFailurePenalty : std::max(0.0, h[i]);
        out.hinge += excess;
        worst = std::max(worst, excess);
      }
    }
  }
  return out;
}

void check_batch(const CandidateLocations& locations, const Problem& problem,
                 const SampleBatch& batch) {
  const auto map =
      IndexMap::build(static_cast<int>(locations.size()), problem.num_tasks(), problem.horizon());
  if (batch.sequence_length() != map.total() || batch.state_dim() != problem.system.state_dim)
    throw InputShapeError("saa: sample batch does not match the number of locations");
  for (const auto& loc : locations)
    if (loc.size() != problem.system.augmented_dim())
      throw InputShapeError("saa: location has the wrong dimension");
}

}  // namespace

Evaluation evaluate(const CandidateLocations& locations, const Problem& problem,
                    const SampleBatch& batch) {
  check_batch(locations, problem, batch);
  const auto samples = static_cast<std::size_t>(batch.samples());
  std::vector<SampleOutcome> outcomes(samples);
  std::vector<std::uint8_t> failed(samples, 0);
  parallel_for(samples, [&](std::size_t m) {
    const RolloutResult rollout = rollout_one(locations, problem, batch.sample(static_cast<int>(m)));
    failed[m] = rollout.failed ? 1 : 0;
    outcomes[m] = score(rollout, problem);
  });

  const int horizon = problem.horizon();
  Evaluation result;
  SAAEstimate& est = result.estimate;
  est.indicators.resize(samples);
  est.violation_profile = Matrix::Zero(problem.num_tasks(), horizon);
  std::size_t satisfied = 0;
  double hinge = 0.0;
  for (std::size_t m = 0; m < samples; ++m) {
    const auto& o = outcomes[m];
    est.indicators[m] = o.satisfied ? 1 : 0;
    satisfied += est.indicators[m];
    est.failures += failed[m];
    hinge += o.hinge;
    result.per_sample_surrogate.push_back(o.hinge);
    for (int j = 0; j < problem.num_tasks(); ++j)
      for (int t = 0; t < horizon; ++t)
        est.violation_profile(j, t) +=
            o.step_violation[static_cast<std::size_t>(j * horizon + t)];
  }
  const auto count = static_cast<double>(samples);
  est.value = static_cast<double>(satisfied) / count;
  est.violation_profile /= count;
  result.surrogate = hinge / count;
  return result;
}

SAAEstimate estimate_satisfaction(const CandidateLocations& locations, const Problem& problem,
                                  const SampleBatch& batch) {
  return evaluate(locations, problem, batch).estimate;
}

std::vector<int> active_coordinates(const Problem& problem) {
  std::vector<int> coords = problem.system.gp_input_projection;
  std::sort(coords.begin(), coords.end());
  return coords;
}

SurrogateValue surrogate(const CandidateLocations& locations, const Problem& problem,
                         const SampleBatch& batch, bool with_gradient) {
  SurrogateValue out;
  out.value = evaluate(locations, problem, batch).surrogate;
  if (!with_gradient) return out;

  const int dim = problem.system.augmented_dim();
  Vector gradient = Vector::Zero(static_cast<Eigen::Index>(locations.size()) * dim);
  for (std::size_t i = 0; i < locations.size(); ++i) {
    for (int c : active_coordinates(problem)) {
      CandidateLocations plus = locations;
      CandidateLocations minus = locations;
      plus[i][c] += kGradientStep;
      minus[i][c] -= kGradientStep;
      const double up = evaluate(plus, problem, batch).surrogate;
      const double down = evaluate(minus, problem, batch).surrogate;
      gradient[static_cast<Eigen::Index>(i) * dim + c] = (up - down) / (2.0 * kGradientStep);
    }
  }
  out.gradient = std::move(gradient);
  return out;
}

}  // namespace dsml
