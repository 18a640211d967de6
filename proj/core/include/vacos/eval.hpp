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

#ifndef VACOS_EVAL_HPP_
#define VACOS_EVAL_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vacos/data.hpp"
#include "vacos/knn.hpp"
#include "vacos/label.hpp"

namespace vacos
{

struct SplitSpec
{
  double train_fraction = 0.8;
  std::uint64_t seed = 42;
  bool stratified = true;
};

/// Validation size is n - floor(train_fraction * n); with stratification the
/// per-class quotas are count * (1 - train_fraction), rounded down and then
/// topped up by largest remainder (ties to the smaller class) until they sum
/// to the validation size. Both sides keep every point in dataset order.
struct Split
{
  std::vector<LabeledPoint> train;
  std::vector<LabeledPoint> validation;
  std::vector<std::size_t> train_indices;
  std::vector<std::size_t> validation_indices;
};

Split split(const Dataset & data, const SplitSpec & spec);

/// The three reproduction cases.
enum class CaseId
{
  kRawCosine = 1,        ///< cosine on raw features
  kPerClassOracle = 2,   ///< population covariance per class; queries use their true class's transform
  kExpectedTransform = 3 ///< sample covariances of the training data mixed by the MLE prior
};

const char * to_string(CaseId id) noexcept;
/// Parses "1", "2" or "3". Throws InputError otherwise.
CaseId parse_case(const std::string & text);

struct CaseOptions
{
  /// Opt-in diagonal jitter for rank-deficient class covariances.
  bool jitter = false;
  /// Case 2 fits its covariances on the training split only (leakage
  /// sensitivity). Off by default: every point of the class is used.
  bool case2_training_only = false;
  /// Worker threads for CV folds. Results do not depend on this.
  unsigned jobs = 1;
};

/// Display names used in error messages, indexed by Label.
using ClassNames = std::array<std::string, 2>;
ClassNames class_names_of(const Dataset & data);

/// Builds the metric of `id` from `fit_points`: nothing for case 1, per-class
/// population-covariance transforms for case 2, and the prior-weighted mix of
/// per-class sample-covariance transforms for case 3. Non-positive-definite
/// class covariances surface as NotPositiveDefinite naming the class.
MetricMode fit_metric(
  CaseId id, std::span<const LabeledPoint> fit_points, const CaseOptions & options = {},
  const ClassNames & names = {"negative", "positive"});

struct ClassMetrics
{
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;
};

/// Classification table in the familiar precision / recall / f1 / support
/// layout. Row 0 is the negative class, row 1 the positive class.
struct EvaluationReport
{
  std::array<ClassMetrics, 2> classes{};
  double accuracy = 0.0;
  ClassMetrics macro{};
  ClassMetrics weighted{};
  /// confusion[truth][predicted], indexed by Label.
  std::array<std::array<std::size_t, 2>, 2> confusion{};
  /// Cells that hit a zero denominator and were reported as 0, e.g. "precision[1]".
  std::vector<std::string> zero_division;

  std::optional<CaseId> case_id;
  std::size_t k = 0;
  std::optional<std::uint64_t> seed;

  std::size_t total() const noexcept;
};

EvaluationReport classification_report(std::span<const Label> predictions, std::span<const Label> truths);

/// Recomputes every derived cell from the confusion matrix and returns the
/// largest deviation from what the report holds.
double report_consistency_error(const EvaluationReport & report);

struct CaseRun
{
  EvaluationReport report;
  std::vector<Label> predictions;
  std::vector<Label> truths;
  std::size_t train_size = 0;
  MetricMode metric;
};

/// Split, fit the case's metric, run KNN on the validation side.
CaseRun run_case_detailed(
  const Dataset & data, CaseId id, const SplitSpec & spec, std::size_t k, const CaseOptions & options = {});
EvaluationReport run_case(
  const Dataset & data, CaseId id, const SplitSpec & spec, std::size_t k, const CaseOptions & options = {});

struct FoldResult
{
  std::size_t fold = 0;
  std::size_t size = 0;
  std::size_t correct = 0;
  double accuracy = 0.0;
};

struct CvResult
{
  /// Mean of per-fold accuracies (for LOOCV, the mean of the 0/1 indicators).
  double mean_accuracy = 0.0;
  std::vector<FoldResult> folds;
};

/// Leave-one-out: every point is held out once and the whole case pipeline is
/// refit on the rest, covariances and prior included.
CvResult loocv(const Dataset & data, CaseId id, std::size_t k, const CaseOptions & options = {});

/// Stratified fold ids: each class is shuffled with Rng(seed), classes are
/// concatenated (negative first) and position i goes to fold i mod folds.
std::vector<std::size_t> fold_assignment(const Dataset & data, std::size_t folds, std::uint64_t seed);

CvResult kfold_cv(
  const Dataset & data, CaseId id, std::size_t k, std::size_t folds, std::uint64_t seed,
  const CaseOptions & options = {});

/// Error-rate curve over `k_values` on the validation side of `spec`.
SweepResult sweep_case(
  const Dataset & data, CaseId id, const SplitSpec & spec, std::span<const std::size_t> k_values,
  const CaseOptions & options = {});

// Rendering.

/// Fixed-width table, three decimals:
///
///                   precision    recall  f1-score   support
///
///              0        0.921     0.986     0.952        71
///              1        0.974     0.860     0.914        43
///
///       accuracy                            0.939       114
///      macro avg        0.947     0.923     0.933       114
///   weighted avg        0.941     0.939     0.938       114
std::string format_table(const EvaluationReport & report);
std::string format_confusion(const EvaluationReport & report, const ClassNames & names);
/// One row per table row at full precision: row,precision,recall,f1_score,support.
std::string format_csv(const EvaluationReport & report);
/// JSON object (versioned by kReportSchemaVersion) carrying full-precision values.
std::string to_json(const EvaluationReport & report, const ClassNames & names, int indent = 2);

inline constexpr int kReportSchemaVersion = 1;

}  // namespace vacos

#endif  // VACOS_EVAL_HPP_
