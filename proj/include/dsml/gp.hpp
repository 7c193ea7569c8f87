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

// Independent per-output-dimension Gaussian processes with a squared
// exponential kernel.
//
// All output dimensions share the kernel, the conditioning inputs and the
// per-point noise, so they share one Gram matrix. A single packed Cholesky
// factor is kept and extended one row at a time (O(n^2) per conditioning).
// Targets are stored whitened (L^{-1} Y) so a posterior query costs one
// forward substitution.

#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace dsml {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

struct KernelParams {
  double signal_variance = 1.0;
  /// One lengthscale per entry of `input_projection`.
  std::vector<double> lengthscales;
  /// Default observation noise added to the Gram diagonal.
  double noise_variance = 0.0;
  /// Indices of the augmented state read by the kernel.
  std::vector<int> input_projection;

  /// Throws ConfigError unless the invariants hold for augmented states
  /// of dimension `augmented_dim`.
  void validate(int augmented_dim) const;

  bool operator==(const KernelParams&) const = default;
};

/// sigma_f^2 * exp(-0.5 * sum_i ((a_i - b_i) / l_i)^2) over projected indices.
double kernel_eval(const KernelParams& params, const Vector& a, const Vector& b);

struct Posterior {
  Vector mean;
  Vector std;
};

class MultiGP {
 public:
  MultiGP(KernelParams params, int output_dim);

  /// Conditions sequentially on (points[i], targets.row(i)) with the
  /// default noise variance.
  static MultiGP from_data(KernelParams params, const std::vector<Vector>& points,
                           const Matrix& targets);

  const KernelParams& params() const { return params_; }
  int output_dim() const { return output_dim_; }
  int input_dim() const { return static_cast<int>(params_.input_projection.size()); }
  std::size_t size() const { return noise_.size(); }

  Posterior posterior(const Vector& query) const;

  /// New state with one more observation, noise = params().noise_variance.
  MultiGP condition(const Vector& point, const Vector& target) const&;
  MultiGP condition(const Vector& point, const Vector& target) &&;

  /// As condition(), with an explicit noise variance for this observation.
  MultiGP condition(const Vector& point, const Vector& target, double noise_variance) const&;
  MultiGP condition(const Vector& point, const Vector& target, double noise_variance) &&;

  /// Draws g(point) = mean + std * zeta (first output_dim entries of zeta)
  /// and conditions on it without noise, so later draws belong to the same
  /// sampled function. When the posterior variance at `point` is
  /// negligible (at most 1e-8 sigma_f^2) the mean is returned and the state is
  /// unchanged.
  std::pair<Vector, MultiGP> sample_eval(const Vector& point, const Vector& zeta) const&;
  std::pair<Vector, MultiGP> sample_eval(const Vector& point, const Vector& zeta) &&;

  /// Projected conditioning input i.
  Vector point(std::size_t i) const;
  /// Targets of conditioning input i (one entry per output dimension).
  Vector target(std::size_t i) const;
  /// Noise variance (including any jitter) on the diagonal for input i.
  double point_noise(std::size_t i) const { return noise_[i]; }
  /// Dense copy of the lower-triangular Cholesky factor.
  Matrix cholesky() const;

 private:
  Vector project(const Vector& x) const;
  void covariance_column(const double* query, std::vector<double>& k) const;
  void forward_solve(std::vector<double>& v) const;
  double clamp_variance(double raw) const;
  void append(const double* projected, const Vector& target, double noise,
              const std::vector<double>& l, double pivot);
  void condition_in_place(const Vector& point, const Vector& target, double noise);
  Vector sample_in_place(const Vector& point, const Vector& zeta);

  KernelParams params_;
  int output_dim_;
  std::vector<double> inv_lengthscales_;
  std::vector<double> points_;    // n x input_dim, row-major
  std::vector<double> noise_;     // n
  std::vector<double> chol_;      // packed lower triangle, row i at i(i+1)/2
  std::vector<double> targets_;   // n x output_dim
  std::vector<double> whitened_;  // L^{-1} targets, n x output_dim
};

}  // namespace dsml
