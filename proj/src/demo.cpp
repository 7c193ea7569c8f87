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

#include "dsml/demo.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "dsml/errors.hpp"

namespace dsml::demo {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kSingularTolerance = 1e-9;
}  // namespace

double literal_denominator(const Vector& x) {
  return 1.0 + std::exp(-5.0 * x[0]) - 0.5 + std::cos(kPi * x[1]);
}

Vector dynamics(const Vector& x, Variant variant) {
  if (x.size() < 2) throw InputShapeError("demo::dynamics: need a 2-d state");
  if (!std::isfinite(x[0]) || !std::isfinite(x[1]))
    throw NumericInputError("demo::dynamics: non-finite state");
  Vector out(2);
  out[0] = x[0] + (std::cos(2.0 * kPi * x[0]) - 1.0) * x[1];
  if (variant == Variant::Literal) {
    const double denom = literal_denominator(x);
    if (std::abs(denom) < kSingularTolerance)
      throw SingularityError("demo::dynamics: singular denominator at (" + std::to_string(x[0]) +
                             ", " + std::to_string(x[1]) + ")");
    out[1] = 1.0 / denom;
  } else {
    out[1] = 1.0 / (1.0 + std::exp(-5.0 * x[0])) - 0.5 + std::cos(kPi * x[1]);
  }
  return out;
}

double singularity_margin(const Vector& x) { return std::abs(literal_denominator(x)); }

Vector reference_trajectory(int task, int t) {
  const double time = static_cast<double>(t);
  switch (task) {
    case 1:
      return Vector::Zero(2);
    case 2:
      return Vector{{std::sin(2.0 * kPi * time / 50.0), std::cos(2.0 * kPi * time / 50.0)}};
    case 3:
      return Vector{{2.0 * std::sin(2.0 * kPi * time / 25.0), std::cos(2.0 * kPi * time / 100.0)}};
    default:
      throw ConfigError("demo: unknown task id " + std::to_string(task));
  }
}

double tracking_bound(int t) { return std::max(3.0 * std::exp(-t / 5.0), 0.1); }

ControlLaw feedback_linearizing(Reference reference, int lead, int input_dim) {
  return [reference = std::move(reference), lead, input_dim](const Vector& x, const MultiGP& gp,
                                                             int t) -> Vector {
    const Vector query = augment(x, Vector::Zero(input_dim));
    return reference(t + lead) - gp.posterior(query).mean;
  };
}

Vector feedback_linearizing_control(const Vector& x, const MultiGP& controller_gp, int t, int task,
                                    int lead) {
  const Vector query = augment(x, Vector::Zero(2));
  return reference_trajectory(task, t + lead) - controller_gp.posterior(query).mean;
}

Vector constraints(int task, const Vector& augmented, int t) {
  const Vector x = augmented.head(2);
  switch (task) {
    case 1:
    case 2:
      return Vector::Constant(1, (x - reference_trajectory(task, t)).norm() - tracking_bound(t));
    case 3:
      return Vector::Constant(1, std::abs(x[0]) - 2.5);
    default:
      throw ConfigError("demo: unknown task id " + std::to_string(task));
  }
}

SystemSpec make_system(const Matrix& noise_scale, Variant variant) {
  SystemSpec system;
  system.state_dim = 2;
  system.input_dim = 2;
  system.known_dynamics = [](const Vector& aug) -> Vector { return aug.tail(2); };
  system.true_unknown = [variant](const Vector& aug) -> Vector {
    return dynamics(aug.head(2), variant);
  };
  system.noise_scale = noise_scale;
  system.gp_input_projection = {0, 1};
  return system;
}

}  // namespace dsml::demo
