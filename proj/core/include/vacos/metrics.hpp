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

#ifndef VACOS_METRICS_HPP_
#define VACOS_METRICS_HPP_

#include <cstddef>
#include <optional>
#include <span>

#include "vacos/label.hpp"
#include "vacos/linalg.hpp"

namespace vacos
{

/// Cosine similarity clamped to [-1, 1].
class SimilarityScore
{
public:
  /// Clamps `raw` into [-1, 1]; rounding can push a cosine to 1 + 1e-16.
  static SimilarityScore from_raw(double raw) noexcept;

  double value() const noexcept { return value_; }
  /// 1 - value, in [0, 2].
  double distance() const noexcept { return 1.0 - value_; }

private:
  explicit SimilarityScore(double value) noexcept : value_(value) {}
  double value_;
};

/// Norms below this are treated as zero.
inline constexpr double kZeroNormThreshold = 1e-300;

SimilarityScore cosine_similarity(std::span<const double> a, std::span<const double> b);
double cosine_distance(std::span<const double> a, std::span<const double> b);

/// Cosine from a precomputed dot product and norms, with the same clamping and
/// zero-norm checks as cosine_similarity. Lets callers that cache norms stay
/// bit-identical to the direct route.
SimilarityScore cosine_from_parts(double dot, double norm_a, double norm_b);
double dot(std::span<const double> a, std::span<const double> b);
double norm(std::span<const double> a);

/// Cholesky whitening fitted on one class (or one covariance): the factor L
/// with L L^T = C and its inverse L^-1, which maps raw vectors to a space
/// where the class has identity covariance.
class WhiteningTransform
{
public:
  WhiteningTransform(
    LowerTriangular factor, LowerTriangular inverse_factor, EstimationMode source_mode,
    FeatureVector mean, std::optional<Label> class_label = std::nullopt);

  /// Factorizes `cov`. `mean` is only used by the centering option and may be
  /// empty, in which case a zero vector is stored.
  static WhiteningTransform from_covariance(
    const CovarianceMatrix & cov, FeatureVector mean = {},
    std::optional<Label> class_label = std::nullopt, CholeskyOptions options = {});

  /// Estimates the covariance of `samples` with `mode`, then factorizes it.
  static WhiteningTransform fit(
    std::span<const FeatureVector> samples, EstimationMode mode,
    std::optional<Label> class_label = std::nullopt, CholeskyOptions options = {});

  const LowerTriangular & factor() const noexcept { return factor_; }
  const LowerTriangular & inverse_factor() const noexcept { return inverse_; }
  EstimationMode source_mode() const noexcept { return mode_; }
  const FeatureVector & mean() const noexcept { return mean_; }
  const std::optional<Label> & class_label() const noexcept { return label_; }
  std::size_t dim() const noexcept { return factor_.dim(); }

private:
  LowerTriangular factor_;
  LowerTriangular inverse_;
  EstimationMode mode_;
  FeatureVector mean_;
  std::optional<Label> label_;
};

/// prior * L_pos^-1 + (1 - prior) * L_neg^-1, used when a query's class is unknown.
class ExpectedTransform
{
public:
  ExpectedTransform(WhiteningTransform positive, WhiteningTransform negative, double prior);

  /// Stored as a general matrix; callers must not rely on triangularity.
  const Matrix & mix() const noexcept { return mix_; }
  double prior() const noexcept { return prior_; }
  const WhiteningTransform & positive() const noexcept { return positive_; }
  const WhiteningTransform & negative() const noexcept { return negative_; }
  /// Prior-weighted mean of the component means.
  const FeatureVector & mean() const noexcept { return mean_; }
  std::size_t dim() const noexcept { return mix_.rows(); }

private:
  WhiteningTransform positive_;
  WhiteningTransform negative_;
  double prior_;
  Matrix mix_;
  FeatureVector mean_;
};

struct WhitenOptions
{
  /// Subtract the transform's fitted mean before applying it. Every
  /// reproduction path leaves this off: the transform acts on raw vectors.
  bool center = false;
};

FeatureVector whiten(const WhiteningTransform & t, std::span<const double> x, WhitenOptions options = {});
FeatureVector whiten(const ExpectedTransform & t, std::span<const double> x, WhitenOptions options = {});

/// Squared Mahalanobis distance computed as ||L^-1 (x - mu)||^2; the inverse
/// covariance is never formed.
double mahalanobis_sq(std::span<const double> x, std::span<const double> mu, const WhiteningTransform & t);

/// Cosine between the two vectors after the same transform is applied to both.
SimilarityScore adjusted_cosine(
  std::span<const double> a, std::span<const double> b, const WhiteningTransform & t,
  WhitenOptions options = {});
SimilarityScore adjusted_cosine(
  std::span<const double> a, std::span<const double> b, const ExpectedTransform & t,
  WhitenOptions options = {});

/// Maximum-likelihood estimate of P(positive): n_pos / (n_pos + n_neg).
double class_prior_mle(std::size_t n_pos, std::size_t n_neg);

ExpectedTransform expected_transform(
  const WhiteningTransform & t_pos, const WhiteningTransform & t_neg, double prior);

}  // namespace vacos

#endif  // VACOS_METRICS_HPP_
