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

#ifndef VACOS_KNN_HPP_
#define VACOS_KNN_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "vacos/label.hpp"
#include "vacos/linalg.hpp"
#include "vacos/metrics.hpp"

namespace vacos
{

struct LabeledPoint
{
  FeatureVector features;
  Label label = Label::kNegative;
  /// Stable record identifier; breaks exact distance ties.
  std::uint64_t id = 0;
};

/// Cosine on untransformed vectors.
struct RawCosine
{
};

/// Each vector is whitened with the inverse factor of its own class.
///
/// Queries are whitened with the transform of their *true* class, which the
/// caller must supply as a hint to predict(). This leaks the label into the
/// query representation and is why this mode scores perfectly; it exists to
/// reproduce that procedure, not as a usable classifier.
struct PerClassWhitened
{
  WhiteningTransform positive;
  WhiteningTransform negative;

  const WhiteningTransform & for_label(Label label) const noexcept
  {
    return label == Label::kPositive ? positive : negative;
  }
};

/// Every vector, training and query alike, is mapped by one expected transform.
struct ExpectedWhitened
{
  ExpectedTransform transform;
};

using MetricMode = std::variant<RawCosine, PerClassWhitened, ExpectedWhitened>;

const char * metric_name(const MetricMode & metric) noexcept;
bool requires_label_hint(const MetricMode & metric) noexcept;

inline constexpr std::size_t kDefaultK = 13;

/// Only one tie policy exists; the enum names it so configs are explicit.
///
/// kNearestFirst: neighbors are ordered by (distance, record id) and exactly k
/// are taken. An equal vote goes to the class of the nearest of those k.
enum class TieRule
{
  kNearestFirst,
};

struct KnnConfig
{
  std::size_t k = kDefaultK;
  MetricMode metric = RawCosine{};
  TieRule tie_rule = TieRule::kNearestFirst;
};

struct Neighbor
{
  std::size_t index;  ///< position in the training set as passed to fit()
  std::uint64_t id;
  double distance;    ///< 1 - cos in the metric's space
  Label label;
};

/// A fitted (lazy) classifier: stores the training vectors already mapped
/// into the metric's space. Immutable; predict() may be called concurrently.
class FittedKnn
{
public:
  std::size_t k() const noexcept { return k_; }
  std::size_t size() const noexcept { return vectors_.size(); }
  std::size_t dim() const noexcept { return dim_; }
  const MetricMode & metric() const noexcept { return metric_; }
  TieRule tie_rule() const noexcept { return tie_rule_; }

  /// Stored (transformed) training vector `i`.
  std::span<const double> stored(std::size_t i) const noexcept { return vectors_[i]; }

  /// Maps a raw query into the metric's space. The hint is required for
  /// PerClassWhitened and rejected for every other mode.
  FeatureVector transform_query(std::span<const double> x, std::optional<Label> hint) const;

  /// The `count` nearest training points, ordered by (distance, id).
  std::vector<Neighbor> nearest(
    std::span<const double> x, std::optional<Label> hint, std::size_t count) const;

  Label predict(std::span<const double> x, std::optional<Label> hint = std::nullopt) const;

private:
  friend FittedKnn fit(std::span<const LabeledPoint> train, KnnConfig config);

  FittedKnn() = default;
  std::vector<Neighbor> nearest_transformed(std::span<const double> q, std::size_t count) const;

  std::size_t k_ = kDefaultK;
  std::size_t dim_ = 0;
  MetricMode metric_;
  TieRule tie_rule_ = TieRule::kNearestFirst;
  std::vector<FeatureVector> vectors_;
  std::vector<double> norms_;
  std::vector<Label> labels_;
  std::vector<std::uint64_t> ids_;
};

FittedKnn fit(std::span<const LabeledPoint> train, KnnConfig config);

Label predict(const FittedKnn & model, std::span<const double> x, std::optional<Label> true_label_hint = std::nullopt);

/// Majority label among the first `k` of `sorted` (already ordered nearest
/// first) under `rule`.
Label vote(std::span<const Neighbor> sorted, std::size_t k, TieRule rule = TieRule::kNearestFirst);

struct SweepPoint
{
  std::size_t k;
  double misclassification_rate;
};

struct SweepResult
{
  std::vector<SweepPoint> curve;
  std::size_t argmin_k;  ///< smallest k attaining the minimum rate
  double min_rate;
};

/// Error rate on `validation` for every k in `k_values`. Validation labels
/// double as hints when the metric needs one. `jobs` > 1 spreads validation
/// points over threads; results are identical to jobs == 1.
SweepResult sweep_k(
  std::span<const LabeledPoint> train, std::span<const LabeledPoint> validation,
  const MetricMode & metric, std::span<const std::size_t> k_values, unsigned jobs = 1);

}  // namespace vacos

#endif  // VACOS_KNN_HPP_
