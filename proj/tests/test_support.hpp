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

// Test-only oracles, kept independent of the library's incremental paths.

#pragma once

#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "dsml/gp.hpp"

namespace dsml::testing {

/// Squared-exponential kernel written out directly from its formula.
inline double se_kernel(const KernelParams& p, const Vector& a, const Vector& b) {
  double sq = 0.0;
  for (std::size_t i = 0; i < p.input_projection.size(); ++i) {
    const double d = (a[p.input_projection[i]] - b[p.input_projection[i]]) / p.lengthscales[i];
    sq += d * d;
  }
  return p.signal_variance * std::exp(-0.5 * sq);
}

struct DensePosterior {
  Vector mean;
  Vector variance;
};

/// Posterior by an explicit dense solve with (K + diag(noise)).
inline DensePosterior dense_posterior(const KernelParams& p, const std::vector<Vector>& points,
                                      const Matrix& targets, const std::vector<double>& noise,
                                      const Vector& query) {
  const auto n = static_cast<Eigen::Index>(points.size());
  const auto dims = targets.cols();
  if (n == 0)
    return {Vector::Zero(dims), Vector::Constant(dims, p.signal_variance)};
  Matrix gram(n, n);
  Vector k(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) gram(i, j) = se_kernel(p, points[i], points[j]);
    gram(i, i) += noise[static_cast<std::size_t>(i)];
    k[i] = se_kernel(p, query, points[i]);
  }
  const Eigen::FullPivLU<Matrix> lu(gram);
  const Matrix alpha = lu.solve(targets);
  const Vector beta = lu.solve(k);
  const double var = se_kernel(p, query, query) - k.dot(beta);
  return {alpha.transpose() * k, Vector::Constant(dims, var)};
}

inline Vector random_vector(std::mt19937_64& gen, int n, double lo, double hi) {
  std::uniform_real_distribution<double> dist(lo, hi);
  Vector v(n);
  for (int i = 0; i < n; ++i) v[i] = dist(gen);
  return v;
}

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

}  // namespace dsml::testing
