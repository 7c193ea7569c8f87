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

#include "dsml/gp.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "dsml/errors.hpp"

namespace dsml {

namespace {

// Pivots below this fraction of sigma_f^2 are treated as a breakdown.
constexpr double kMinPivot = 1e-12;
// Jitter ladder, as fractions of sigma_f^2.
constexpr double kFirstJitter = 1e-10;
constexpr double kMaxJitter = 1e-4;
// Negative variances down to this fraction of sigma_f^2 are round-off.
constexpr double kVarianceRoundOff = 1e-10;
// A sampled point with less posterior variance than this is already
// determined: it returns the mean and is not added.
constexpr double kDeterminedVariance = 1e-8;

std::string format_point(const Vector& x) {
  std::ostringstream out;
  out.precision(17);
  out << '(';
  for (Eigen::Index i = 0; i < x.size(); ++i) out << (i ? ", " : "") << x[i];
  out << ')';
  return out.str();
}

}  // namespace

void KernelParams::validate(int augmented_dim) const {
  if (!(signal_variance > 0.0) || !std::isfinite(signal_variance))
    throw ConfigError("kernel: signal_variance must be positive and finite");
  if (!(noise_variance >= 0.0) || !std::isfinite(noise_variance))
    throw ConfigError("kernel: noise_variance must be non-negative and finite");
  if (input_projection.empty()) throw ConfigError("kernel: input_projection is empty");
  if (lengthscales.size() != input_projection.size())
    throw ConfigError("kernel: need one lengthscale per projected input");
  for (double l : lengthscales)
    if (!(l > 0.0) || !std::isfinite(l))
      throw ConfigError("kernel: lengthscales must be positive and finite");
  std::set<int> seen;
  for (int idx : input_projection) {
    if (idx < 0 || (augmented_dim > 0 && idx >= augmented_dim))
      throw ConfigError("kernel: input_projection index out of range");
    if (!seen.insert(idx).second) throw ConfigError("kernel: duplicate input_projection index");
  }
}

double kernel_eval(const KernelParams& params, const Vector& a, const Vector& b) {
  if (a.size() != b.size())
    throw InputShapeError("kernel_eval: arguments have different dimensions");
  if (params.lengthscales.size() != params.input_projection.size())
    throw InputShapeError("kernel_eval: lengthscale/projection size mismatch");
  double sq = 0.0;
  for (std::size_t i = 0; i < params.input_projection.size(); ++i) {
    const int idx = params.input_projection[i];
    if (idx < 0 || idx >= a.size())
      throw InputShapeError("kernel_eval: projection index outside the argument");
    const double d = (a[idx] - b[idx]) / params.lengthscales[i];
    sq += d * d;
  }
  return params.signal_variance * std::exp(-0.5 * sq);
}

MultiGP::MultiGP(KernelParams params, int output_dim)
    : params_(std::move(params)), output_dim_(output_dim) {
  params_.validate(0);
  if (output_dim_ < 1) throw ConfigError("MultiGP: output dimension must be positive");
  inv_lengthscales_.reserve(params_.lengthscales.size());
  for (double l : params_.lengthscales) inv_lengthscales_.push_back(1.0 / l);
}

MultiGP MultiGP::from_data(KernelParams params, const std::vector<Vector>& points,
                           const Matrix& targets) {
  if (static_cast<Eigen::Index>(points.size()) != targets.rows())
    throw InputShapeError("MultiGP::from_data: points/targets row mismatch");
  MultiGP gp(std::move(params), static_cast<int>(targets.cols()));
  for (std::size_t i = 0; i < points.size(); ++i)
    gp.condition_in_place(points[i], targets.row(static_cast<Eigen::Index>(i)).transpose(),
                          gp.params_.noise_variance);
  return gp;
}

Vector MultiGP::project(const Vector& x) const {
  Vector p(input_dim());
  for (int i = 0; i < input_dim(); ++i) {
    const int idx = params_.input_projection[static_cast<std::size_t>(i)];
    if (idx >= x.size())
      throw InputShapeError("MultiGP: query has " + std::to_string(x.size()) +
                            " entries, kernel reads index " + std::to_string(idx));
    p[i] = x[idx];
    if (!std::isfinite(p[i])) throw NumericInputError("MultiGP: non-finite query " + format_point(x));
  }
  return p;
}

void MultiGP::covariance_column(const double* query, std::vector<double>& k) const {
  const std::size_t n = size();
  const auto d = static_cast<std::size_t>(input_dim());
  k.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double* p = points_.data() + i * d;
    double sq = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      const double diff = (query[j] - p[j]) * inv_lengthscales_[j];
      sq += diff * diff;
    }
    k[i] = params_.signal_variance * std::exp(-0.5 * sq);
  }
}

void MultiGP::forward_solve(std::vector<double>& v) const {
  const std::size_t n = v.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double* row = chol_.data() + i * (i + 1) / 2;
    double acc = v[i];
    for (std::size_t j = 0; j < i; ++j) acc -= row[j] * v[j];
    v[i] = acc / row[i];
  }
}

double MultiGP::clamp_variance(double raw) const {
  if (raw >= 0.0) return raw;
  if (raw >= -kVarianceRoundOff * params_.signal_variance) return 0.0;
  throw InternalError("MultiGP: posterior variance " + std::to_string(raw) +
                      " is negative beyond round-off");
}

Posterior MultiGP::posterior(const Vector& query) const {
  const Vector q = project(query);
  Posterior out{Vector::Zero(output_dim_),
                Vector::Constant(output_dim_, std::sqrt(params_.signal_variance))};
  if (size() == 0) return out;
  std::vector<double> v;
  covariance_column(q.data(), v);
  forward_solve(v);
  double explained = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    explained += v[i] * v[i];
    const double* w = whitened_.data() + i * static_cast<std::size_t>(output_dim_);
    for (int d = 0; d < output_dim_; ++d) out.mean[d] += v[i] * w[d];
  }
  out.std.setConstant(std::sqrt(clamp_variance(params_.signal_variance - explained)));
  return out;
}

void MultiGP::append(const double* projected, const Vector& target, double noise,
                     const std::vector<double>& l, double pivot) {
  const std::size_t n = size();
  const double diag = std::sqrt(pivot);
  points_.insert(points_.end(), projected, projected + input_dim());
  noise_.push_back(noise);
  chol_.insert(chol_.end(), l.begin(), l.end());
  chol_.push_back(diag);
  for (int d = 0; d < output_dim_; ++d) {
    double acc = target[d];
    for (std::size_t i = 0; i < n; ++i)
      acc -= l[i] * whitened_[i * static_cast<std::size_t>(output_dim_) + static_cast<std::size_t>(d)];
    targets_.push_back(target[d]);
    whitened_.push_back(acc / diag);
  }
}

void MultiGP::condition_in_place(const Vector& point, const Vector& target, double noise) {
  if (target.size() != output_dim_)
    throw InputShapeError("MultiGP::condition: target has wrong dimension");
  if (!target.allFinite()) throw NumericInputError("MultiGP::condition: non-finite target");
  if (!(noise >= 0.0) || !std::isfinite(noise))
    throw NumericInputError("MultiGP::condition: noise variance must be non-negative");
  const Vector p = project(point);
  std::vector<double> l;
  covariance_column(p.data(), l);
  forward_solve(l);
  double explained = 0.0;
  for (double x : l) explained += x * x;
  const double sf2 = params_.signal_variance;
  const double raw = sf2 + noise - explained;
  if (raw >= kMinPivot * sf2) {
    append(p.data(), target, noise, l, raw);
    return;
  }
  if (noise == 0.0) {
    const auto d = static_cast<std::size_t>(input_dim());
    for (std::size_t i = 0; i < size(); ++i) {
      if (noise_[i] == 0.0 && std::equal(p.data(), p.data() + d, points_.data() + i * d))
        throw ConditioningError("MultiGP::condition: point " + format_point(point) +
                                " duplicates noise-free conditioning input " + std::to_string(i) +
                                "; Gram matrix singular under any admissible jitter");
    }
  }
  for (double jitter = kFirstJitter; jitter <= kMaxJitter * 1.0000001; jitter *= 10.0) {
    const double pivot = raw + jitter * sf2;
    if (pivot >= kMinPivot * sf2) {
      append(p.data(), target, noise + jitter * sf2, l, pivot);
      return;
    }
  }
  throw ConditioningError("MultiGP::condition: Cholesky breakdown at point " + format_point(point) +
                          " (pivot " + std::to_string(raw) + ") after jitter escalation");
}

Vector MultiGP::sample_in_place(const Vector& point, const Vector& zeta) {
  if (zeta.size() < output_dim_) throw InputShapeError("MultiGP::sample_eval: zeta too short");
  const Vector p = project(point);
  std::vector<double> l;
  covariance_column(p.data(), l);
  forward_solve(l);
  double explained = 0.0;
  Vector value = Vector::Zero(output_dim_);
  for (std::size_t i = 0; i < l.size(); ++i) {
    explained += l[i] * l[i];
    const double* w = whitened_.data() + i * static_cast<std::size_t>(output_dim_);
    for (int d = 0; d < output_dim_; ++d) value[d] += l[i] * w[d];
  }
  const double variance = clamp_variance(params_.signal_variance - explained);
  if (variance <= kDeterminedVariance * params_.signal_variance) return value;
  const double sd = std::sqrt(variance);
  for (int d = 0; d < output_dim_; ++d) value[d] += sd * zeta[d];
  append(p.data(), value, 0.0, l, variance);
  return value;
}

MultiGP MultiGP::condition(const Vector& point, const Vector& target) const& {
  return MultiGP(*this).condition(point, target, params_.noise_variance);
}

MultiGP MultiGP::condition(const Vector& point, const Vector& target) && {
  const double noise = params_.noise_variance;
  return std::move(*this).condition(point, target, noise);
}

MultiGP MultiGP::condition(const Vector& point, const Vector& target, double noise_variance) const& {
  return MultiGP(*this).condition(point, target, noise_variance);
}

MultiGP MultiGP::condition(const Vector& point, const Vector& target, double noise_variance) && {
  condition_in_place(point, target, noise_variance);
  return std::move(*this);
}

std::pair<Vector, MultiGP> MultiGP::sample_eval(const Vector& point, const Vector& zeta) const& {
  return MultiGP(*this).sample_eval(point, zeta);
}

std::pair<Vector, MultiGP> MultiGP::sample_eval(const Vector& point, const Vector& zeta) && {
  Vector value = sample_in_place(point, zeta);
  return {std::move(value), std::move(*this)};
}

Vector MultiGP::point(std::size_t i) const {
  const auto d = static_cast<std::size_t>(input_dim());
  return Eigen::Map<const Vector>(points_.data() + i * d, input_dim());
}

Vector MultiGP::target(std::size_t i) const {
  const auto d = static_cast<std::size_t>(output_dim_);
  return Eigen::Map<const Vector>(targets_.data() + i * d, output_dim_);
}

Matrix MultiGP::cholesky() const {
  const auto n = static_cast<Eigen::Index>(size());
  Matrix l = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j <= i; ++j)
      l(i, j) = chol_[static_cast<std::size_t>(i * (i + 1) / 2 + j)];
  return l;
}

}  // namespace dsml
