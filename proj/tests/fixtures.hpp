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

// Small problems with closed-form answers, shared by the unit and
// acceptance tests.

#pragma once

#include <cmath>

#include "dsml/system.hpp"
#include "test_support.hpp"

namespace dsml::testing {

/// Scalar state, scalar input. known(x, u) = a x + u.
inline SystemSpec scalar_system(double a, double q) {
  SystemSpec s;
  s.state_dim = 1;
  s.input_dim = 1;
  s.known_dynamics = [a](const Vector& aug) -> Vector {
    return Vector::Constant(1, a * aug[0] + aug[1]);
  };
  s.true_unknown = [](const Vector&) -> Vector { return Vector::Zero(1); };
  s.noise_scale = Matrix::Constant(1, 1, q);
  s.gp_input_projection = {0};
  return s;
}

inline TaskSpec scalar_task(ControlLaw law, ConstraintFn constraint, int horizon, double x0) {
  TaskSpec t;
  t.control_law = std::move(law);
  t.constraints = std::move(constraint);
  t.horizon = horizon;
  t.initial_state = Vector::Constant(1, x0);
  return t;
}

inline ControlLaw zero_input() {
  return [](const Vector&, const MultiGP&, int) -> Vector { return Vector::Zero(1); };
}

inline ControlLaw gain_input(double k) {
  return [k](const Vector& x, const MultiGP&, int) -> Vector { return -k * x; };
}

/// u = r - mu(x): cancels the learned part and steers to r.
inline ControlLaw cancel_to(double r) {
  return [r](const Vector& x, const MultiGP& gp, int) -> Vector {
    return Vector::Constant(1, r) - gp.posterior(augment(x, Vector::Zero(1))).mean;
  };
}

inline ConstraintFn abs_bound(double center, double bound) {
  return [center, bound](const Vector& aug, int) -> Vector {
    return Vector::Constant(1, std::abs(aug[0] - center) - bound);
  };
}

inline ConstraintFn constant_constraint(double value) {
  return [value](const Vector&, int) -> Vector { return Vector::Constant(1, value); };
}

/// x_{t+1} = x_t + g + w with a practically zero GP, Q = 1, |x_1| <= 2,
/// x_0 = 0: satisfaction probability P(|zeta| <= 2).
inline Problem gaussian_calibration_problem() {
  const KernelParams kernel{1e-24, {1.0}, 0.0, {0}};
  return Problem{scalar_system(1.0, 1.0),
                 {scalar_task(zero_input(), abs_bound(0.0, 2.0), 1, 0.0)},
                 MultiGP(kernel, 1)};
}

inline double gaussian_calibration_probability() { return std::erf(2.0 / std::sqrt(2.0)); }

/// One-step tracking to r with a GP-cancelling controller, no prior data.
/// Satisfaction depends on the single measurement location only through
/// the posterior variance at r.
struct TrackingFixture {
  double reference = 0.8;
  double bound = 0.3;
  double q = 0.1;
  double signal_variance = 1.0;
  double lengthscale = 1.0;

  KernelParams kernel() const { return {signal_variance, {lengthscale}, q * q, {0}}; }

  Problem problem() const {
    SystemSpec system = scalar_system(0.0, q);
    return Problem{system,
                   {scalar_task(cancel_to(reference), abs_bound(reference, bound), 1, reference)},
                   MultiGP(kernel(), 1)};
  }

  ExplorationRegion region() const { return {Vector{{-2.0, -2.0}}, Vector{{2.0, 2.0}}}; }

  /// Closed-form satisfaction probability for one measurement at `location`.
  double probability(double location) const {
    const double n2 = q * q;
    const double k = signal_variance *
                     std::exp(-0.5 * std::pow((location - reference) / lengthscale, 2));
    const double model_var = signal_variance - k * k / (signal_variance + n2);
    const double sd = std::sqrt(model_var + n2);
    return 2.0 * normal_cdf(bound / sd) - 1.0;
  }

  /// Grid search over [-2, 2] on the closed form.
  double grid_optimum() const {
    double best = -2.0;
    for (int i = 0; i <= 4000; ++i) {
      const double x = -2.0 + 0.001 * i;
      if (probability(x) > probability(best)) best = x;
    }
    return best;
  }
};

}  // namespace dsml::testing
