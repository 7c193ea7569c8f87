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

#include "dsml/validation.hpp"

#include <algorithm>
#include <cmath>

#include "dsml/errors.hpp"
#include "dsml/rng.hpp"
#include "dsml/saa.hpp"

namespace dsml {

namespace {

Vector noise(const SystemSpec& system, Rng& rng) {
  Vector xi(system.state_dim);
  for (int i = 0; i < system.state_dim; ++i) xi[i] = rng.normal();
  return system.noise_scale * xi;
}

struct Accumulator {
  std::vector<int> counts;
  std::vector<double> sum;
  std::vector<double> sum_sq;
  std::vector<double> max;
  int violating = 0;
};

void finish(TaskValidation& out, const Accumulator& acc, int runs) {
  const std::size_t H = acc.sum.size();
  out.violation_counts = acc.counts;
  out.mean_violation.assign(H, 0.0);
  out.std_violation.assign(H, 0.0);
  out.max_violation = acc.max;
  for (std::size_t t = 0; t < H; ++t) {
    const double mean = acc.sum[t] / runs;
    out.mean_violation[t] = mean;
    out.std_violation[t] =
        runs > 1 ? std::sqrt(std::max(0.0, (acc.sum_sq[t] - runs * mean * mean) / (runs - 1)))
                 : 0.0;
  }
  out.violating_runs = acc.violating;
  out.violation_rate = static_cast<double>(acc.violating) / runs;
}

}  // namespace

ValidationReport validate_plan(const Problem& problem, const CandidateLocations& locations,
                               int runs, std::uint64_t seed) {
  problem.validate();
  const SystemSpec& system = problem.system;
  if (!system.true_unknown)
    throw ConfigError("validation: the system has no true dynamics to validate against");
  if (runs < 1) throw ConfigError("validation: runs must be at least 1");
  const int H = problem.horizon();
  const int L = problem.num_tasks();
  Rng rng(seed);

  MultiGP controller = problem.prior_gp;
  for (const auto& loc : locations) {
    const Vector value = system.true_unknown(loc) + noise(system, rng);
    controller = std::move(controller).condition(loc, value);
  }

  std::vector<Accumulator> acc(static_cast<std::size_t>(L));
  for (auto& a : acc) {
    a.counts.assign(static_cast<std::size_t>(H), 0);
    a.sum.assign(static_cast<std::size_t>(H), 0.0);
    a.sum_sq.assign(static_cast<std::size_t>(H), 0.0);
    a.max.assign(static_cast<std::size_t>(H), 0.0);
  }
  ValidationReport report;
  report.runs = runs;
  report.horizon = H;

  for (int run = 0; run < runs; ++run) {
    bool run_violated = false;
    bool run_failed = false;
    for (int j = 0; j < L; ++j) {
      const TaskSpec& task = problem.tasks[static_cast<std::size_t>(j)];
      Accumulator& a = acc[static_cast<std::size_t>(j)];
      Vector x = task.initial_state;
      bool violated = false;
      bool failed = false;
      for (int t = 1; t <= H; ++t) {
        double v = kFailurePenalty;
        if (!failed) {
          try {
            const Vector u = task.control_law(x, controller, t - 1);
            const Vector aug = augment(x, u);
            x = system.known_dynamics(aug) + system.true_unknown(aug) + noise(system, rng);
            if (!x.allFinite() || x.norm() > kDivergenceNorm) {
              failed = true;
            } else {
              const Vector h =
                  task.constraints(augment(x, Vector::Zero(system.input_dim)), t);
              v = 0.0;
              for (Eigen::Index i = 0; i < h.size(); ++i)
                v = std::isnan(h[i]) ? kFailurePenalty : std::max(v, h[i]);
            }
          } catch (const std::exception&) {
            failed = true;
          }
        }
        const auto k = static_cast<std::size_t>(t - 1);
        if (v > 0.0) {
          ++a.counts[k];
          violated = true;
        }
        a.sum[k] += v;
        a.sum_sq[k] += v * v;
        a.max[k] = std::max(a.max[k], v);
      }
      a.violating += violated;
      run_violated = run_violated || violated;
      run_failed = run_failed || failed;
    }
    report.violating_runs += run_violated;
    report.failed_runs += run_failed;
  }
  for (int j = 0; j < L; ++j) {
    TaskValidation tv;
    tv.task = problem.tasks[static_cast<std::size_t>(j)].id;
    finish(tv, acc[static_cast<std::size_t>(j)], runs);
    report.tasks.push_back(std::move(tv));
  }
  report.violation_rate = static_cast<double>(report.violating_runs) / runs;
  report.satisfaction_rate = 1.0 - report.violation_rate;
  return report;
}

ValidationReport merge_reports(const std::vector<ValidationReport>& reports) {
  if (reports.empty()) throw ConfigError("validation: nothing to merge");
  const ValidationReport& first = reports.front();
  const std::size_t L = first.tasks.size();
  const auto H = static_cast<std::size_t>(first.horizon);
  std::vector<Accumulator> acc(L);
  for (auto& a : acc) {
    a.counts.assign(H, 0);
    a.sum.assign(H, 0.0);
    a.sum_sq.assign(H, 0.0);
    a.max.assign(H, 0.0);
  }
  ValidationReport out;
  out.horizon = first.horizon;
  for (const auto& r : reports) {
    if (r.tasks.size() != L || r.horizon != first.horizon)
      throw ConfigError("validation: reports differ in tasks or horizon");
    out.runs += r.runs;
    out.violating_runs += r.violating_runs;
    out.failed_runs += r.failed_runs;
    for (std::size_t j = 0; j < L; ++j) {
      const TaskValidation& tv = r.tasks[j];
      Accumulator& a = acc[j];
      a.violating += tv.violating_runs;
      for (std::size_t t = 0; t < H; ++t) {
        const double n = r.runs;
        a.counts[t] += tv.violation_counts[t];
        a.sum[t] += tv.mean_violation[t] * n;
        // recover the sum of squares from the sample std
        a.sum_sq[t] += tv.std_violation[t] * tv.std_violation[t] * (n - 1) +
                       n * tv.mean_violation[t] * tv.mean_violation[t];
        a.max[t] = std::max(a.max[t], tv.max_violation[t]);
      }
    }
  }
  for (std::size_t j = 0; j < L; ++j) {
    TaskValidation tv;
    tv.task = first.tasks[j].task;
    finish(tv, acc[j], out.runs);
    out.tasks.push_back(std::move(tv));
  }
  out.violation_rate = static_cast<double>(out.violating_runs) / out.runs;
  out.satisfaction_rate = 1.0 - out.violation_rate;
  return out;
}

}  // namespace dsml
