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

// The two-dimensional benchmark system: learned state map, known input
// channel, three reference-tracking tasks.

#pragma once

#include <functional>

#include "dsml/system.hpp"

namespace dsml::demo {

/// How the second component's denominator is grouped.
///   Literal:  1 / (1 + exp(-5 x1) - 1/2 + cos(pi x2))
///   Logistic: 1 / (1 + exp(-5 x1)) - 1/2 + cos(pi x2)
enum class Variant { Literal, Logistic };

/// Denominator of the literal variant, 1 + exp(-5 x1) - 1/2 + cos(pi x2).
double literal_denominator(const Vector& x);

/// Unknown state map g(x). Throws SingularityError when the literal
/// denominator is within 1e-9 of zero.
Vector dynamics(const Vector& x, Variant variant = Variant::Literal);

/// Distance of the literal denominator from zero. States where it is below
/// 1e-3 are outside the supported demo region.
double singularity_margin(const Vector& x);
inline constexpr double kSupportedMargin = 1e-3;

/// References for task ids 1..3. Throws ConfigError for other ids.
Vector reference_trajectory(int task, int t);

/// phi(t) = max(3 exp(-t / 5), 0.1).
double tracking_bound(int t);

using Reference = std::function<Vector(int t)>;

/// u = -mu(x) + ref(t + lead). The GP is queried at (x, 0).
ControlLaw feedback_linearizing(Reference reference, int lead, int input_dim);

Vector feedback_linearizing_control(const Vector& x, const MultiGP& controller_gp, int t, int task,
                                    int lead = 0);

/// Tasks 1, 2: ||x - ref(t)|| - phi(t). Task 3: |x1| - 5/2.
Vector constraints(int task, const Vector& augmented, int t);

/// known(x, u) = u; unknown = dynamics(x); state-only GP input.
SystemSpec make_system(const Matrix& noise_scale, Variant variant = Variant::Literal);

}  // namespace dsml::demo
