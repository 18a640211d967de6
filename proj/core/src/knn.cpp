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

#include "vacos/knn.hpp"

#include <algorithm>
#include <string>
#include <utility>

#include "parallel.hpp"
#include "vacos/error.hpp"

namespace vacos
{

namespace
{

template <class... Ts>
struct overloaded : Ts...
{
  using Ts::operator()...;
};

bool neighbor_less(const Neighbor & a, const Neighbor & b) noexcept
{
  if (a.distance != b.distance) {
    return a.distance < b.distance;
  }
  if (a.id != b.id) {
    return a.id < b.id;
  }
  return a.index < b.index;
}

std::size_t metric_dim(const MetricMode & metric)
{
  return std::visit(
    overloaded{
      [](const RawCosine &) -> std::size_t { return 0; },
      [](const PerClassWhitened & m) -> std::size_t {
        if (m.positive.dim() != m.negative.dim()) {
          throw DimensionMismatch("per-class transforms have different dimensions");
        }
        return m.positive.dim();
      },
      [](const ExpectedWhitened & m) -> std::size_t { return m.transform.dim(); },
    },
    metric);
}

}  // namespace

const char * metric_name(const MetricMode & metric) noexcept
{
  return std::visit(
    overloaded{
      [](const RawCosine &) { return "raw-cosine"; },
      [](const PerClassWhitened &) { return "per-class-whitened"; },
      [](const ExpectedWhitened &) { return "expected-whitened"; },
    },
    metric);
}

bool requires_label_hint(const MetricMode & metric) noexcept
{
  return std::holds_alternative<PerClassWhitened>(metric);
}

FittedKnn fit(std::span<const LabeledPoint> train, KnnConfig config)
{
  if (train.empty()) {
    throw InputError("knn: empty training set");
  }
  if (config.k == 0) {
    throw InputError("knn: k must be >= 1");
  }
  if (config.k > train.size()) {
    throw InputError(
      "knn: k = " + std::to_string(config.k) + " exceeds training set size " +
      std::to_string(train.size()));
  }

  const std::size_t p = train.front().features.size();
  std::size_t positives = 0;
  for (std::size_t i = 0; i < train.size(); ++i) {
    if (train[i].features.size() != p) {
      throw DimensionMismatch(
        "knn: training point " + std::to_string(i) + " has dimension " +
        std::to_string(train[i].features.size()) + ", expected " + std::to_string(p));
    }
    positives += train[i].label == Label::kPositive ? 1 : 0;
  }
  const std::size_t tdim = metric_dim(config.metric);
  if (tdim != 0 && tdim != p) {
    throw DimensionMismatch(
      "knn: transform dimension " + std::to_string(tdim) + " does not match data dimension " +
      std::to_string(p));
  }
  if (requires_label_hint(config.metric) && (positives == 0 || positives == train.size())) {
    throw InputError("knn: per-class metric needs both classes in the training set");
  }

  FittedKnn model;
  model.k_ = config.k;
  model.dim_ = p;
  model.tie_rule_ = config.tie_rule;
  model.vectors_.reserve(train.size());
  model.norms_.reserve(train.size());
  model.labels_.reserve(train.size());
  model.ids_.reserve(train.size());

  for (const auto & point : train) {
    FeatureVector v = std::visit(
      overloaded{
        [&](const RawCosine &) { return point.features; },
        [&](const PerClassWhitened & m) { return whiten(m.for_label(point.label), point.features); },
        [&](const ExpectedWhitened & m) { return whiten(m.transform, point.features); },
      },
      config.metric);
    const double n = norm(v);
    if (!(n >= kZeroNormThreshold)) {
      throw ZeroVector("knn: training point id " + std::to_string(point.id) + " has zero norm");
    }
    model.vectors_.push_back(std::move(v));
    model.norms_.push_back(n);
    model.labels_.push_back(point.label);
    model.ids_.push_back(point.id);
  }
  model.metric_ = std::move(config.metric);
  return model;
}

FeatureVector FittedKnn::transform_query(std::span<const double> x, std::optional<Label> hint) const
{
  if (x.size() != dim_) {
    throw DimensionMismatch(
      "knn: query has dimension " + std::to_string(x.size()) + ", model expects " +
      std::to_string(dim_));
  }
  const bool needs_hint = requires_label_hint(metric_);
  if (needs_hint && !hint) {
    throw InputError("knn: per-class-whitened metric requires the query's label hint");
  }
  if (!needs_hint && hint) {
    throw InputError(std::string("knn: label hint is not allowed for metric ") + metric_name(metric_));
  }
  return std::visit(
    overloaded{
      [&](const RawCosine &) { return FeatureVector(x.begin(), x.end()); },
      [&](const PerClassWhitened & m) { return whiten(m.for_label(*hint), x); },
      [&](const ExpectedWhitened & m) { return whiten(m.transform, x); },
    },
    metric_);
}

std::vector<Neighbor> FittedKnn::nearest_transformed(std::span<const double> q, std::size_t count) const
{
  const double qn = norm(q);
  if (!(qn >= kZeroNormThreshold)) {
    throw ZeroVector("knn: query has zero norm after transformation");
  }
  std::vector<Neighbor> all;
  all.reserve(vectors_.size());
  for (std::size_t i = 0; i < vectors_.size(); ++i) {
    const double d = cosine_from_parts(dot(vectors_[i], q), norms_[i], qn).distance();
    all.push_back(Neighbor{i, ids_[i], d, labels_[i]});
  }
  count = std::min(count, all.size());
  std::partial_sort(
    all.begin(), all.begin() + static_cast<std::ptrdiff_t>(count), all.end(), neighbor_less);
  all.resize(count);
  return all;
}

std::vector<Neighbor> FittedKnn::nearest(
  std::span<const double> x, std::optional<Label> hint, std::size_t count) const
{
  return nearest_transformed(transform_query(x, hint), count);
}

Label FittedKnn::predict(std::span<const double> x, std::optional<Label> hint) const
{
  const auto neighbors = nearest(x, hint, k_);
  return vote(neighbors, k_, tie_rule_);
}

Label predict(const FittedKnn & model, std::span<const double> x, std::optional<Label> true_label_hint)
{
  return model.predict(x, true_label_hint);
}

Label vote(std::span<const Neighbor> sorted, std::size_t k, TieRule rule)
{
  if (k == 0 || sorted.size() < k) {
    throw InputError("vote: need at least k neighbors");
  }
  std::size_t positives = 0;
  for (std::size_t i = 0; i < k; ++i) {
    positives += sorted[i].label == Label::kPositive ? 1 : 0;
  }
  const std::size_t negatives = k - positives;
  if (positives != negatives) {
    return positives > negatives ? Label::kPositive : Label::kNegative;
  }
  switch (rule) {
    case TieRule::kNearestFirst:
      return sorted.front().label;
  }
  return sorted.front().label;
}

SweepResult sweep_k(
  std::span<const LabeledPoint> train, std::span<const LabeledPoint> validation,
  const MetricMode & metric, std::span<const std::size_t> k_values, unsigned jobs)
{
  if (k_values.empty()) {
    throw InputError("sweep_k: empty k range");
  }
  if (validation.empty()) {
    throw InputError("sweep_k: empty validation set");
  }
  const std::size_t k_max = *std::max_element(k_values.begin(), k_values.end());
  for (std::size_t k : k_values) {
    if (k == 0 || k > train.size()) {
      throw InputError(
        "sweep_k: k = " + std::to_string(k) + " outside [1, " + std::to_string(train.size()) + "]");
    }
  }

  const FittedKnn model = fit(train, KnnConfig{k_max, metric, TieRule::kNearestFirst});
  const bool hinted = requires_label_hint(metric);

  // errors[v][j] is 1 when validation point v is misclassified at k_values[j].
  std::vector<std::vector<unsigned char>> errors(validation.size());
  detail::parallel_for(validation.size(), jobs, [&](std::size_t v) {
    const auto & point = validation[v];
    const auto hint = hinted ? std::optional<Label>(point.label) : std::nullopt;
    const auto neighbors = model.nearest(point.features, hint, k_max);
    auto & row = errors[v];
    row.resize(k_values.size());
    for (std::size_t j = 0; j < k_values.size(); ++j) {
      row[j] = vote(neighbors, k_values[j], model.tie_rule()) != point.label ? 1 : 0;
    }
  });

  SweepResult result{{}, k_values.front(), 2.0};
  result.curve.reserve(k_values.size());
  for (std::size_t j = 0; j < k_values.size(); ++j) {
    std::size_t wrong = 0;
    for (const auto & row : errors) {
      wrong += row[j];
    }
    const double rate = static_cast<double>(wrong) / static_cast<double>(validation.size());
    result.curve.push_back(SweepPoint{k_values[j], rate});
    if (rate < result.min_rate || (rate == result.min_rate && k_values[j] < result.argmin_k)) {
      result.min_rate = rate;
      result.argmin_k = k_values[j];
    }
  }
  return result;
}

}  // namespace vacos
