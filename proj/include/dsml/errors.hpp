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

#pragma once

#include <stdexcept>
#include <string>

namespace dsml {

/// Argument has the wrong dimension for the operation.
class InputShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Argument contains NaN or infinity.
class NumericInputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Gram extension could not be factorized, even with jitter.
class ConditioningError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid or inconsistent configuration (planner, tasks, config files).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Demo dynamics evaluated on (or numerically next to) their singular set.
class SingularityError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A computation produced a value that should be impossible (e.g. a
/// posterior variance far below zero).
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Every multi-start of the location optimizer failed.
class PlannerError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace dsml
