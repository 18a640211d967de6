// Copyright 2026 The vacos Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "vacos/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "vacos/error.hpp"

namespace vacos
{

namespace
{

void require_dim(std::size_t expected, std::size_t actual, const char * what)
{
  if (expected != actual) {
    throw DimensionMismatch(
      std::string(what) + ": expected dimension " + std::to_string(expected) + ", got " +
      std::to_string(actual));
  }
}

FeatureVector maybe_centered(std::span<const double> x, const FeatureVector & mean, bool center)
{
  FeatureVector out(x.begin(), x.end());
  if (center) {
    for (std::size_t i = 0; i < out.size(); ++i) {
      out[i] -= mean[i];
    }
  }
  return out;
}

}  // namespace

SimilarityScore SimilarityScore::from_raw(double raw) noexcept
{
  return SimilarityScore(std::clamp(raw, -1.0, 1.0));
}

double dot(std::span<const double> a, std::span<const double> b)
{
  require_dim(a.size(), b.size(), "dot");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    s += a[i] * b[i];
  }
  return s;
}

double norm(std::span<const double> a)
{
  double s = 0.0;
  for (double v : a) {
    s += v * v;
  }
  return std::sqrt(s);
}

SimilarityScore cosine_from_parts(double dot_ab, double norm_a, double norm_b)
{
  if (!(norm_a >= kZeroNormThreshold) || !(norm_b >= kZeroNormThreshold)) {
    throw ZeroVector("cosine of a zero-norm vector is undefined");
  }
  return SimilarityScore::from_raw(dot_ab / (norm_a * norm_b));
}

SimilarityScore cosine_similarity(std::span<const double> a, std::span<const double> b)
{
  require_dim(a.size(), b.size(), "cosine_similarity");
  return cosine_from_parts(dot(a, b), norm(a), norm(b));
}

double cosine_distance(std::span<const double> a, std::span<const double> b)
{
  return cosine_similarity(a, b).distance();
}

WhiteningTransform::WhiteningTransform(
  LowerTriangular factor, LowerTriangular inverse_factor, EstimationMode source_mode,
  FeatureVector mean, std::optional<Label> class_label)
: factor_(std::move(factor)),
  inverse_(std::move(inverse_factor)),
  mode_(source_mode),
  mean_(std::move(mean)),
  label_(class_label)
{
  require_dim(factor_.dim(), inverse_.dim(), "WhiteningTransform inverse");
  if (mean_.empty()) {
    mean_.assign(factor_.dim(), 0.0);
  }
  require_dim(factor_.dim(), mean_.size(), "WhiteningTransform mean");
}

WhiteningTransform WhiteningTransform::from_covariance(
  const CovarianceMatrix & cov, FeatureVector mean, std::optional<Label> class_label,
  CholeskyOptions options)
{
  LowerTriangular factor = cholesky_lower(cov, options);
  LowerTriangular inverse = invert_lower_triangular(factor);
  return WhiteningTransform(std::move(factor), std::move(inverse), cov.mode(), std::move(mean), class_label);
}

WhiteningTransform WhiteningTransform::fit(
  std::span<const FeatureVector> samples, EstimationMode mode, std::optional<Label> class_label,
  CholeskyOptions options)
{
  const CovarianceMatrix cov = covariance(samples, mode);
  try {
    return from_covariance(cov, mean_vector(samples), class_label, options);
  } catch (const NotPositiveDefinite & e) {
    const std::string who = class_label ? std::string("class ") + to_string(*class_label) : "samples";
    throw NotPositiveDefinite(e.pivot_index(), e.pivot_value(), who + " covariance");
  }
}

ExpectedTransform::ExpectedTransform(WhiteningTransform positive, WhiteningTransform negative, double prior)
: positive_(std::move(positive)), negative_(std::move(negative)), prior_(prior)
{
  if (!(prior_ >= 0.0 && prior_ <= 1.0)) {
    throw InputError("prior must lie in [0, 1], got " + std::to_string(prior_));
  }
  require_dim(positive_.dim(), negative_.dim(), "expected_transform");
  // Written as neg + prior * (pos - neg) so that prior 0 or 1, or identical
  // components, reproduce a component exactly.
  const Matrix & pos = positive_.inverse_factor().matrix();
  const Matrix & neg = negative_.inverse_factor().matrix();
  if (prior_ == 1.0) {
    mix_ = pos;
  } else if (prior_ == 0.0) {
    mix_ = neg;
  } else {
    mix_ = Matrix(pos.rows(), pos.cols());
    for (std::size_t i = 0; i < pos.rows(); ++i) {
      for (std::size_t j = 0; j < pos.cols(); ++j) {
        mix_(i, j) = neg(i, j) + prior_ * (pos(i, j) - neg(i, j));
      }
    }
  }
  mean_.resize(positive_.dim());
  for (std::size_t i = 0; i < mean_.size(); ++i) {
    mean_[i] = prior_ * positive_.mean()[i] + (1.0 - prior_) * negative_.mean()[i];
  }
}

FeatureVector whiten(const WhiteningTransform & t, std::span<const double> x, WhitenOptions options)
{
  require_dim(t.dim(), x.size(), "whiten");
  if (!options.center) {
    return multiply(t.inverse_factor().matrix(), x);
  }
  return multiply(t.inverse_factor().matrix(), maybe_centered(x, t.mean(), true));
}

FeatureVector whiten(const ExpectedTransform & t, std::span<const double> x, WhitenOptions options)
{
  require_dim(t.dim(), x.size(), "whiten");
  if (!options.center) {
    return multiply(t.mix(), x);
  }
  return multiply(t.mix(), maybe_centered(x, t.mean(), true));
}

double mahalanobis_sq(std::span<const double> x, std::span<const double> mu, const WhiteningTransform & t)
{
  require_dim(t.dim(), x.size(), "mahalanobis_sq");
  require_dim(t.dim(), mu.size(), "mahalanobis_sq mean");
  FeatureVector diff(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    diff[i] = x[i] - mu[i];
  }
  const FeatureVector z = multiply(t.inverse_factor().matrix(), diff);
  return dot(z, z);
}

SimilarityScore adjusted_cosine(
  std::span<const double> a, std::span<const double> b, const WhiteningTransform & t,
  WhitenOptions options)
{
  return cosine_similarity(whiten(t, a, options), whiten(t, b, options));
}

SimilarityScore adjusted_cosine(
  std::span<const double> a, std::span<const double> b, const ExpectedTransform & t,
  WhitenOptions options)
{
  return cosine_similarity(whiten(t, a, options), whiten(t, b, options));
}

double class_prior_mle(std::size_t n_pos, std::size_t n_neg)
{
  if (n_pos + n_neg == 0) {
    throw InputError("class prior needs at least one observation");
  }
  return static_cast<double>(n_pos) / static_cast<double>(n_pos + n_neg);
}

ExpectedTransform expected_transform(
  const WhiteningTransform & t_pos, const WhiteningTransform & t_neg, double prior)
{
  return ExpectedTransform(t_pos, t_neg, prior);
}

}  // namespace vacos
