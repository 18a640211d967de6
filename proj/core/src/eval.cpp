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

#include "vacos/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>

#include "parallel.hpp"
#include "vacos/error.hpp"
#include "vacos/metrics.hpp"
#include "vacos/random.hpp"

namespace vacos
{

namespace
{

constexpr std::array<Label, 2> kLabels{Label::kNegative, Label::kPositive};

std::vector<std::size_t> indices_of(const Dataset & data, Label label)
{
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < data.points.size(); ++i) {
    if (data.points[i].label == label) {
      out.push_back(i);
    }
  }
  return out;
}

std::vector<FeatureVector> class_features(std::span<const LabeledPoint> points, Label label)
{
  std::vector<FeatureVector> out;
  for (const auto & p : points) {
    if (p.label == label) {
      out.push_back(p.features);
    }
  }
  return out;
}

WhiteningTransform fit_class(
  std::span<const LabeledPoint> points, Label label, EstimationMode mode, const CaseOptions & options,
  const ClassNames & names)
{
  const auto samples = class_features(points, label);
  const std::string who =
    "class '" + names[index_of(label)] + "' (" + to_string(label) + ") " + to_string(mode) + " covariance";
  if (samples.size() < 2) {
    throw InputError(who + ": needs at least 2 points, got " + std::to_string(samples.size()));
  }
  try {
    return WhiteningTransform::fit(samples, mode, label, CholeskyOptions{options.jitter});
  } catch (const NotPositiveDefinite & e) {
    throw NotPositiveDefinite(e.pivot_index(), e.pivot_value(), who);
  }
}

/// Runs fn and prefixes any library error with the fold index, keeping its category.
template <typename Fn>
auto with_fold_context(std::size_t fold, Fn && fn)
{
  const std::string prefix = "fold " + std::to_string(fold);
  try {
    return fn();
  } catch (const NotPositiveDefinite & e) {
    throw NotPositiveDefinite(
      e.pivot_index(), e.pivot_value(), prefix + (e.context().empty() ? "" : ": " + e.context()));
  } catch (const NumericalError & e) {
    throw NumericalError(prefix + ": " + e.what());
  } catch (const InputError & e) {
    throw InputError(prefix + ": " + e.what());
  }
}

struct FoldOutcome
{
  std::size_t size = 0;
  std::size_t correct = 0;
};

/// Fits the case on `train` (which also serves as the covariance scope) and
/// counts correct predictions on `held_out`.
FoldOutcome evaluate_fold(
  CaseId id, std::span<const LabeledPoint> train, std::span<const LabeledPoint> held_out,
  std::size_t k, const CaseOptions & options, const ClassNames & names)
{
  const FittedKnn model = fit(train, KnnConfig{k, fit_metric(id, train, options, names)});
  const bool hinted = requires_label_hint(model.metric());
  FoldOutcome out{held_out.size(), 0};
  for (const auto & p : held_out) {
    const auto hint = hinted ? std::optional<Label>(p.label) : std::nullopt;
    out.correct += model.predict(p.features, hint) == p.label ? 1 : 0;
  }
  return out;
}

CvResult run_folds(
  const Dataset & data, CaseId id, std::size_t k, const std::vector<std::size_t> & fold_of,
  std::size_t folds, const CaseOptions & options)
{
  const ClassNames names = class_names_of(data);
  std::vector<FoldOutcome> outcomes(folds);
  detail::parallel_for(folds, options.jobs, [&](std::size_t f) {
    outcomes[f] = with_fold_context(f, [&] {
      std::vector<LabeledPoint> train;
      std::vector<LabeledPoint> held_out;
      train.reserve(data.points.size());
      for (std::size_t i = 0; i < data.points.size(); ++i) {
        (fold_of[i] == f ? held_out : train).push_back(data.points[i]);
      }
      if (held_out.empty()) {
        throw InputError("empty validation fold");
      }
      return evaluate_fold(id, train, held_out, k, options, names);
    });
  });

  CvResult result;
  result.folds.reserve(folds);
  double sum = 0.0;
  for (std::size_t f = 0; f < folds; ++f) {
    const double acc = static_cast<double>(outcomes[f].correct) / static_cast<double>(outcomes[f].size);
    result.folds.push_back(FoldResult{f, outcomes[f].size, outcomes[f].correct, acc});
    sum += acc;
  }
  result.mean_accuracy = sum / static_cast<double>(folds);
  return result;
}

double safe_ratio(std::size_t num, std::size_t den, const std::string & cell, std::vector<std::string> & flags)
{
  if (den == 0) {
    flags.push_back(cell);
    return 0.0;
  }
  return static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

Split split(const Dataset & data, const SplitSpec & spec)
{
  if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0)) {
    throw InputError("split: train fraction must lie strictly between 0 and 1");
  }
  const std::size_t n = data.points.size();
  for (Label label : kLabels) {
    if (data.count(label) < 2) {
      throw InputError(
        std::string("split: class '") + data.label_name(label) + "' has fewer than 2 points");
    }
  }
  const auto train_size = static_cast<std::size_t>(std::floor(spec.train_fraction * static_cast<double>(n) + 1e-9));
  const std::size_t validation_size = n - train_size;
  if (train_size == 0 || validation_size == 0) {
    throw InputError("split: fraction leaves one side empty");
  }

  Rng rng(spec.seed);
  std::vector<std::size_t> validation;

  if (spec.stratified) {
    std::array<std::vector<std::size_t>, 2> members{indices_of(data, Label::kNegative), indices_of(data, Label::kPositive)};
    std::array<std::size_t, 2> quota{};
    std::array<double, 2> remainder{};
    std::size_t assigned = 0;
    for (int c = 0; c < 2; ++c) {
      const double exact = static_cast<double>(members[c].size()) * (1.0 - spec.train_fraction);
      quota[c] = static_cast<std::size_t>(std::floor(exact + 1e-9));
      remainder[c] = exact - static_cast<double>(quota[c]);
      assigned += quota[c];
    }
    // Top up by largest remainder; near-equal remainders favour the smaller class.
    int first = remainder[1] > remainder[0] ? 1 : 0;
    if (std::abs(remainder[0] - remainder[1]) <= 1e-9) {
      first = members[1].size() < members[0].size() ? 1 : 0;
    }
    for (int step = 0; assigned < validation_size; ++step) {
      ++quota[step % 2 == 0 ? first : 1 - first];
      ++assigned;
    }
    for (int c = 0; c < 2; ++c) {
      quota[c] = std::clamp<std::size_t>(quota[c], 1, members[c].size() - 1);
      rng.shuffle(std::span<std::size_t>(members[c]));
      validation.insert(validation.end(), members[c].begin(), members[c].begin() + static_cast<std::ptrdiff_t>(quota[c]));
    }
  } else {
    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), std::size_t{0});
    rng.shuffle(std::span<std::size_t>(all));
    validation.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(validation_size));
  }

  std::sort(validation.begin(), validation.end());
  std::vector<bool> is_validation(n, false);
  for (std::size_t i : validation) {
    is_validation[i] = true;
  }

  Split out;
  for (std::size_t i = 0; i < n; ++i) {
    if (is_validation[i]) {
      out.validation_indices.push_back(i);
      out.validation.push_back(data.points[i]);
    } else {
      out.train_indices.push_back(i);
      out.train.push_back(data.points[i]);
    }
  }
  return out;
}

const char * to_string(CaseId id) noexcept
{
  switch (id) {
    case CaseId::kRawCosine:
      return "case1-raw-cosine";
    case CaseId::kPerClassOracle:
      return "case2-per-class-population-whitening";
    case CaseId::kExpectedTransform:
      return "case3-expected-sample-whitening";
  }
  return "unknown";
}

CaseId parse_case(const std::string & text)
{
  if (text == "1") {
    return CaseId::kRawCosine;
  }
  if (text == "2") {
    return CaseId::kPerClassOracle;
  }
  if (text == "3") {
    return CaseId::kExpectedTransform;
  }
  throw InputError("unknown case '" + text + "' (expected 1, 2 or 3)");
}

ClassNames class_names_of(const Dataset & data)
{
  return {data.negative_name, data.positive_name};
}

MetricMode fit_metric(
  CaseId id, std::span<const LabeledPoint> fit_points, const CaseOptions & options, const ClassNames & names)
{
  switch (id) {
    case CaseId::kRawCosine:
      return RawCosine{};
    case CaseId::kPerClassOracle:
      return PerClassWhitened{
        fit_class(fit_points, Label::kPositive, EstimationMode::kPopulation, options, names),
        fit_class(fit_points, Label::kNegative, EstimationMode::kPopulation, options, names)};
    case CaseId::kExpectedTransform: {
      auto pos = fit_class(fit_points, Label::kPositive, EstimationMode::kSample, options, names);
      auto neg = fit_class(fit_points, Label::kNegative, EstimationMode::kSample, options, names);
      std::size_t n_pos = 0;
      for (const auto & p : fit_points) {
        n_pos += p.label == Label::kPositive ? 1 : 0;
      }
      const double prior = class_prior_mle(n_pos, fit_points.size() - n_pos);
      return ExpectedWhitened{expected_transform(pos, neg, prior)};
    }
  }
  throw InputError("unknown case");
}

std::size_t EvaluationReport::total() const noexcept
{
  return confusion[0][0] + confusion[0][1] + confusion[1][0] + confusion[1][1];
}

EvaluationReport classification_report(std::span<const Label> predictions, std::span<const Label> truths)
{
  if (predictions.size() != truths.size()) {
    throw InputError(
      "classification_report: " + std::to_string(predictions.size()) + " predictions for " +
      std::to_string(truths.size()) + " truths");
  }
  if (truths.empty()) {
    throw InputError("classification_report: no predictions");
  }

  EvaluationReport r;
  for (std::size_t i = 0; i < truths.size(); ++i) {
    ++r.confusion[index_of(truths[i])][index_of(predictions[i])];
  }
  const std::size_t total = truths.size();

  for (int c = 0; c < 2; ++c) {
    const std::size_t tp = r.confusion[c][c];
    const std::size_t predicted = r.confusion[0][c] + r.confusion[1][c];
    const std::size_t actual = r.confusion[c][0] + r.confusion[c][1];
    auto & m = r.classes[c];
    const std::string idx = "[" + std::to_string(c) + "]";
    m.precision = safe_ratio(tp, predicted, "precision" + idx, r.zero_division);
    m.recall = safe_ratio(tp, actual, "recall" + idx, r.zero_division);
    if (m.precision + m.recall == 0.0) {
      r.zero_division.push_back("f1-score" + idx);
      m.f1 = 0.0;
    } else {
      m.f1 = 2.0 * m.precision * m.recall / (m.precision + m.recall);
    }
    m.support = actual;
  }

  r.accuracy = static_cast<double>(r.confusion[0][0] + r.confusion[1][1]) / static_cast<double>(total);

  r.macro.precision = (r.classes[0].precision + r.classes[1].precision) / 2.0;
  r.macro.recall = (r.classes[0].recall + r.classes[1].recall) / 2.0;
  r.macro.f1 = (r.classes[0].f1 + r.classes[1].f1) / 2.0;
  r.macro.support = total;

  const double w0 = static_cast<double>(r.classes[0].support) / static_cast<double>(total);
  const double w1 = static_cast<double>(r.classes[1].support) / static_cast<double>(total);
  r.weighted.precision = w0 * r.classes[0].precision + w1 * r.classes[1].precision;
  r.weighted.recall = w0 * r.classes[0].recall + w1 * r.classes[1].recall;
  r.weighted.f1 = w0 * r.classes[0].f1 + w1 * r.classes[1].f1;
  r.weighted.support = total;
  return r;
}

double report_consistency_error(const EvaluationReport & report)
{
  std::vector<Label> truths;
  std::vector<Label> preds;
  for (Label t : kLabels) {
    for (Label p : kLabels) {
      for (std::size_t n = 0; n < report.confusion[index_of(t)][index_of(p)]; ++n) {
        truths.push_back(t);
        preds.push_back(p);
      }
    }
  }
  const EvaluationReport fresh = classification_report(preds, truths);
  double worst = std::abs(fresh.accuracy - report.accuracy);
  const auto cmp = [&worst](const ClassMetrics & a, const ClassMetrics & b) {
    worst = std::max(worst, std::abs(a.precision - b.precision));
    worst = std::max(worst, std::abs(a.recall - b.recall));
    worst = std::max(worst, std::abs(a.f1 - b.f1));
    worst = std::max(worst, std::abs(static_cast<double>(a.support) - static_cast<double>(b.support)));
  };
  cmp(fresh.classes[0], report.classes[0]);
  cmp(fresh.classes[1], report.classes[1]);
  cmp(fresh.macro, report.macro);
  cmp(fresh.weighted, report.weighted);
  return worst;
}

CaseRun run_case_detailed(
  const Dataset & data, CaseId id, const SplitSpec & spec, std::size_t k, const CaseOptions & options)
{
  Split parts = split(data, spec);
  const ClassNames names = class_names_of(data);

  // Case 2 estimates each class covariance from every point of that class
  // unless the training-only variant is requested.
  const bool full_scope = id == CaseId::kPerClassOracle && !options.case2_training_only;
  MetricMode metric = full_scope ? fit_metric(id, data.points, options, names)
                                 : fit_metric(id, parts.train, options, names);

  const FittedKnn model = fit(parts.train, KnnConfig{k, metric});
  const bool hinted = requires_label_hint(metric);

  CaseRun run;
  run.train_size = parts.train.size();
  run.predictions.resize(parts.validation.size());
  run.truths.reserve(parts.validation.size());
  for (const auto & p : parts.validation) {
    run.truths.push_back(p.label);
  }
  detail::parallel_for(parts.validation.size(), options.jobs, [&](std::size_t i) {
    const auto & p = parts.validation[i];
    const auto hint = hinted ? std::optional<Label>(p.label) : std::nullopt;
    run.predictions[i] = model.predict(p.features, hint);
  });

  run.report = classification_report(run.predictions, run.truths);
  run.report.case_id = id;
  run.report.k = k;
  run.report.seed = spec.seed;
  run.metric = std::move(metric);
  return run;
}

EvaluationReport run_case(
  const Dataset & data, CaseId id, const SplitSpec & spec, std::size_t k, const CaseOptions & options)
{
  return run_case_detailed(data, id, spec, k, options).report;
}

CvResult loocv(const Dataset & data, CaseId id, std::size_t k, const CaseOptions & options)
{
  const std::size_t n = data.points.size();
  if (n < 2) {
    throw InputError("loocv: needs at least 2 points");
  }
  std::vector<std::size_t> fold_of(n);
  std::iota(fold_of.begin(), fold_of.end(), std::size_t{0});
  return run_folds(data, id, k, fold_of, n, options);
}

std::vector<std::size_t> fold_assignment(const Dataset & data, std::size_t folds, std::uint64_t seed)
{
  if (folds < 2) {
    throw InputError("kfold: needs at least 2 folds");
  }
  if (data.points.size() < folds) {
    throw InputError(
      "kfold: " + std::to_string(folds) + " folds for " + std::to_string(data.points.size()) + " points");
  }
  Rng rng(seed);
  std::vector<std::size_t> order;
  order.reserve(data.points.size());
  for (Label label : kLabels) {
    auto members = indices_of(data, label);
    rng.shuffle(std::span<std::size_t>(members));
    order.insert(order.end(), members.begin(), members.end());
  }
  std::vector<std::size_t> fold_of(data.points.size());
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    fold_of[order[pos]] = pos % folds;
  }
  return fold_of;
}

CvResult kfold_cv(
  const Dataset & data, CaseId id, std::size_t k, std::size_t folds, std::uint64_t seed,
  const CaseOptions & options)
{
  return run_folds(data, id, k, fold_assignment(data, folds, seed), folds, options);
}

SweepResult sweep_case(
  const Dataset & data, CaseId id, const SplitSpec & spec, std::span<const std::size_t> k_values,
  const CaseOptions & options)
{
  const Split parts = split(data, spec);
  const bool full_scope = id == CaseId::kPerClassOracle && !options.case2_training_only;
  const MetricMode metric = full_scope ? fit_metric(id, data.points, options, class_names_of(data))
                                       : fit_metric(id, parts.train, options, class_names_of(data));
  return sweep_k(parts.train, parts.validation, metric, k_values, options.jobs);
}

}  // namespace vacos
