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

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <vector>

#include "knn_oracle.hpp"
#include "test_support.hpp"
#include "vacos/error.hpp"
#include "vacos/eval.hpp"
#include "vacos/knn.hpp"
#include "vacos/random.hpp"

namespace vacos
{
namespace
{

using testing::random_covariance;

LabeledPoint pt(FeatureVector x, Label label, std::uint64_t id)
{
  return LabeledPoint{std::move(x), label, id};
}

constexpr Label kPos = Label::kPositive;
constexpr Label kNeg = Label::kNegative;

std::vector<LabeledPoint> random_dataset(std::mt19937_64 & gen, std::size_t n, std::size_t p)
{
  std::uniform_real_distribution<double> u(0.1, 2.0);
  std::vector<LabeledPoint> out;
  for (std::size_t i = 0; i < n; ++i) {
    const Label label = i % 2 == 0 ? kPos : kNeg;
    FeatureVector x(p);
    for (std::size_t j = 0; j < p; ++j) {
      x[j] = u(gen) + (label == kPos && j == 0 ? 1.0 : 0.0);
    }
    out.push_back(pt(std::move(x), label, 1000 + i));
  }
  return out;
}

std::vector<MetricMode> metrics_for(std::mt19937_64 & gen, std::size_t p)
{
  const auto pos = WhiteningTransform::from_covariance(random_covariance(gen, p, 50.0), {}, kPos);
  const auto neg = WhiteningTransform::from_covariance(random_covariance(gen, p, 50.0), {}, kNeg);
  return {RawCosine{}, PerClassWhitened{pos, neg}, ExpectedWhitened{ExpectedTransform(pos, neg, 0.4)}};
}

std::optional<Label> hint_for(const MetricMode & metric, Label truth)
{
  return requires_label_hint(metric) ? std::optional<Label>(truth) : std::nullopt;
}

TEST(Knn, NearestAngleWinsAtKOne)
{
  const std::vector<LabeledPoint> train{
    pt({1, 0}, kNeg, 1), pt({0, 1}, kPos, 2), pt({1, 1}, kNeg, 3)};
  const auto model = fit(train, KnnConfig{.k = 1});
  EXPECT_EQ(predict(model, FeatureVector{5, 0.1}), kNeg);
  EXPECT_EQ(predict(model, FeatureVector{0.1, 5}), kPos);
  EXPECT_EQ(predict(model, FeatureVector{0, 1}), kPos);
}

TEST(Knn, ExactMatchAtKOne)
{
  std::mt19937_64 gen(1);
  const auto train = random_dataset(gen, 20, 4);
  const auto model = fit(train, KnnConfig{.k = 1});
  for (const auto & p : train) {
    EXPECT_EQ(predict(model, p.features), p.label);
  }
}

TEST(Knn, RejectsBadK)
{
  const std::vector<LabeledPoint> train{pt({1, 0}, kNeg, 1), pt({0, 1}, kPos, 2)};
  EXPECT_THROW(fit(train, KnnConfig{.k = 3}), InputError);
  EXPECT_THROW(fit(train, KnnConfig{.k = 0}), InputError);
  EXPECT_THROW(fit(std::vector<LabeledPoint>{}, KnnConfig{.k = 1}), InputError);
}

TEST(Knn, RejectsMixedDimensionsAndZeroVectors)
{
  EXPECT_THROW(fit(std::vector{pt({1, 0}, kNeg, 1), pt({1}, kPos, 2)}, KnnConfig{.k = 1}), DimensionMismatch);
  EXPECT_THROW(fit(std::vector{pt({0, 0}, kNeg, 1), pt({1, 1}, kPos, 2)}, KnnConfig{.k = 1}), ZeroVector);
  const auto model = fit(std::vector{pt({1, 0}, kNeg, 1), pt({0, 1}, kPos, 2)}, KnnConfig{.k = 1});
  EXPECT_THROW(predict(model, FeatureVector{0, 0}), ZeroVector);
  EXPECT_THROW(predict(model, FeatureVector{1, 0, 0}), DimensionMismatch);
}

TEST(Knn, PerClassNeedsBothClassesAndMatchingDimension)
{
  std::mt19937_64 gen(2);
  const auto metrics = metrics_for(gen, 3);
  const std::vector<LabeledPoint> one_class{pt({1, 2, 3}, kPos, 1), pt({3, 2, 1}, kPos, 2)};
  EXPECT_THROW(fit(one_class, KnnConfig{.k = 1, .metric = metrics[1]}), InputError);
  const std::vector<LabeledPoint> wrong_dim{pt({1, 2}, kPos, 1), pt({2, 1}, kNeg, 2)};
  EXPECT_THROW(fit(wrong_dim, KnnConfig{.k = 1, .metric = metrics[2]}), DimensionMismatch);
}

TEST(Knn, ForcedTieIsDeterministic)
{
  // The query is equidistant from both points; k=2 splits the vote and the
  // (distance, id) order puts id 4 first.
  const std::vector<LabeledPoint> train{pt({0, 1}, kPos, 9), pt({1, 0}, kNeg, 4)};
  const auto model = fit(train, KnnConfig{.k = 2});
  for (int run = 0; run < 5; ++run) {
    EXPECT_EQ(predict(model, FeatureVector{1, 1}), kNeg);
  }
  const std::vector<LabeledPoint> swapped{pt({0, 1}, kPos, 4), pt({1, 0}, kNeg, 9)};
  EXPECT_EQ(predict(fit(swapped, KnnConfig{.k = 2}), FeatureVector{1, 1}), kPos);
}

TEST(Knn, VoteTieGoesToNearest)
{
  const std::vector<Neighbor> sorted{
    {0, 7, 0.1, kPos}, {1, 3, 0.2, kNeg}, {2, 5, 0.3, kNeg}, {3, 1, 0.4, kPos}};
  EXPECT_EQ(vote(sorted, 4), kPos);
  EXPECT_EQ(vote(sorted, 3), kNeg);
  EXPECT_EQ(vote(sorted, 1), kPos);
}

TEST(Knn, HintDiscipline)
{
  std::mt19937_64 gen(3);
  const auto train = random_dataset(gen, 10, 3);
  const auto metrics = metrics_for(gen, 3);
  const FeatureVector x{1, 1, 1};
  const auto raw = fit(train, KnnConfig{.k = 3, .metric = metrics[0]});
  const auto per_class = fit(train, KnnConfig{.k = 3, .metric = metrics[1]});
  const auto expected = fit(train, KnnConfig{.k = 3, .metric = metrics[2]});
  EXPECT_THROW(predict(raw, x, kPos), InputError);
  EXPECT_THROW(predict(expected, x, kNeg), InputError);
  EXPECT_THROW(predict(per_class, x), InputError);
  EXPECT_NO_THROW(predict(per_class, x, kPos));
  EXPECT_TRUE(requires_label_hint(metrics[1]));
  EXPECT_FALSE(requires_label_hint(metrics[0]));
  EXPECT_FALSE(requires_label_hint(metrics[2]));
}

TEST(Knn, PerClassPreWhitensEachPointWithItsOwnClass)
{
  std::mt19937_64 gen(4);
  const auto train = random_dataset(gen, 8, 3);
  const auto metrics = metrics_for(gen, 3);
  const auto & m = std::get<PerClassWhitened>(metrics[1]);
  const auto model = fit(train, KnnConfig{.k = 1, .metric = metrics[1]});
  for (std::size_t i = 0; i < train.size(); ++i) {
    const auto expected = whiten(m.for_label(train[i].label), train[i].features);
    const auto stored = model.stored(i);
    EXPECT_TRUE(std::equal(stored.begin(), stored.end(), expected.begin(), expected.end()));
  }
}

TEST(Knn, MatchesBruteForceOracle)
{
  std::mt19937_64 gen(5);
  for (std::size_t n : {14u, 20u, 33u, 50u}) {
    for (std::size_t p : {2u, 3u, 6u}) {
      const auto data = random_dataset(gen, n, p);
      const std::vector<LabeledPoint> train(data.begin(), data.begin() + n - 5);
      const std::vector<LabeledPoint> queries(data.end() - 5, data.end());
      for (const auto & metric : metrics_for(gen, p)) {
        const testing::KnnOracle oracle{metric};
        for (std::size_t k : {1u, 3u, 5u, 13u}) {
          if (k > train.size()) {
            continue;
          }
          const auto model = fit(train, KnnConfig{.k = k, .metric = metric});
          for (const auto & q : queries) {
            const auto hint = hint_for(metric, q.label);
            EXPECT_EQ(predict(model, q.features, hint), oracle.predict(train, q.features, hint, k))
              << metric_name(metric) << " n=" << n << " p=" << p << " k=" << k;
          }
        }
      }
    }
  }
}

TEST(Knn, MonotoneDistanceChangeKeepsPredictions)
{
  std::mt19937_64 gen(6);
  const auto data = random_dataset(gen, 60, 4);
  const std::vector<LabeledPoint> train(data.begin(), data.begin() + 45);
  for (const auto & metric : metrics_for(gen, 4)) {
    const testing::KnnOracle doubled{metric, [](double c) { return 2.0 - 2.0 * c; }};
    const auto model = fit(train, KnnConfig{.k = 7, .metric = metric});
    for (std::size_t i = 45; i < data.size(); ++i) {
      const auto hint = hint_for(metric, data[i].label);
      EXPECT_EQ(predict(model, data[i].features, hint), doubled.predict(train, data[i].features, hint, 7));
    }
  }
}

TEST(Knn, TrainingOrderDoesNotMatter)
{
  std::mt19937_64 gen(7);
  auto data = random_dataset(gen, 80, 3);
  // Duplicate directions create exact distance ties that only the id breaks.
  for (std::size_t i = 0; i < 10; ++i) {
    data.push_back(pt(data[i].features, other(data[i].label), 5000 + i));
  }
  std::vector<LabeledPoint> shuffled = data;
  Rng(11).shuffle(std::span<LabeledPoint>(shuffled));
  for (const auto & metric : metrics_for(gen, 3)) {
    const auto a = fit(data, KnnConfig{.k = 5, .metric = metric});
    const auto b = fit(shuffled, KnnConfig{.k = 5, .metric = metric});
    std::mt19937_64 qgen(8);
    for (int i = 0; i < 40; ++i) {
      const auto x = testing::random_vector(qgen, 3, 0.1, 2.0);
      const auto hint = hint_for(metric, i % 2 ? kPos : kNeg);
      EXPECT_EQ(a.predict(x, hint), b.predict(x, hint));
    }
    for (std::size_t i = 0; i < 10; ++i) {
      const auto hint = hint_for(metric, data[i].label);
      EXPECT_EQ(a.predict(data[i].features, hint), b.predict(data[i].features, hint));
    }
  }
}

TEST(Knn, NearestIsSortedByDistanceThenId)
{
  const std::vector<LabeledPoint> train{
    pt({2, 0}, kPos, 30), pt({1, 0}, kNeg, 20), pt({0, 1}, kPos, 10), pt({3, 0}, kNeg, 5)};
  const auto model = fit(train, KnnConfig{.k = 1});
  const auto nn = model.nearest(FeatureVector{1, 0}, std::nullopt, 4);
  ASSERT_EQ(nn.size(), 4u);
  EXPECT_EQ(nn[0].id, 5u);
  EXPECT_EQ(nn[1].id, 20u);
  EXPECT_EQ(nn[2].id, 30u);
  EXPECT_EQ(nn[3].id, 10u);
  EXPECT_EQ(nn[3].distance, 1.0);
}

TEST(Knn, WdbcCaseTwoMatchesOracle)
{
  const auto & data = testing::wdbc();
  const auto s = split(data, SplitSpec{});
  const auto metric = fit_metric(CaseId::kPerClassOracle, data.points);
  const auto model = fit(s.train, KnnConfig{.k = 13, .metric = metric});
  const testing::KnnOracle oracle{metric};
  for (const auto & q : s.validation) {
    EXPECT_EQ(predict(model, q.features, q.label), oracle.predict(s.train, q.features, q.label, 13)) << q.id;
  }
}

TEST(Sweep, SeparableToyHasZeroError)
{
  const std::vector<LabeledPoint> train{
    pt({1, 0.1}, kNeg, 1), pt({1, 0.2}, kNeg, 2), pt({1, 0.15}, kNeg, 3),
    pt({0.1, 1}, kPos, 4), pt({0.2, 1}, kPos, 5), pt({0.15, 1}, kPos, 6)};
  const std::vector<LabeledPoint> validation{pt({1, 0.05}, kNeg, 7), pt({0.05, 1}, kPos, 8)};
  const std::vector<std::size_t> ks{1, 2, 3};
  const auto result = sweep_k(train, validation, RawCosine{}, ks);
  ASSERT_EQ(result.curve.size(), 3u);
  for (const auto & point : result.curve) {
    EXPECT_EQ(point.misclassification_rate, 0.0);
  }
  EXPECT_EQ(result.argmin_k, 1u);
}

TEST(Sweep, SixPointToyMatchesExhaustiveEvaluation)
{
  const std::vector<LabeledPoint> train{
    pt({1, 0.1}, kNeg, 1), pt({1, 0.9}, kPos, 2), pt({1, 0.3}, kNeg, 3),
    pt({0.2, 1}, kPos, 4), pt({1, 0.6}, kNeg, 5), pt({0.5, 1}, kPos, 6)};
  const std::vector<LabeledPoint> validation{
    pt({1, 0.7}, kNeg, 7), pt({1, 0.5}, kPos, 8), pt({0.9, 1}, kPos, 9), pt({1, 0.2}, kNeg, 10)};
  std::vector<std::size_t> ks(6);
  std::iota(ks.begin(), ks.end(), 1);
  const auto result = sweep_k(train, validation, RawCosine{}, ks);
  const testing::KnnOracle oracle{MetricMode{RawCosine{}}};
  double best = 2.0;
  std::size_t best_k = 0;
  for (std::size_t i = 0; i < ks.size(); ++i) {
    std::size_t wrong = 0;
    for (const auto & q : validation) {
      wrong += oracle.predict(train, q.features, std::nullopt, ks[i]) != q.label;
    }
    const double rate = static_cast<double>(wrong) / static_cast<double>(validation.size());
    EXPECT_EQ(result.curve[i].k, ks[i]);
    EXPECT_EQ(result.curve[i].misclassification_rate, rate) << "k=" << ks[i];
    if (rate < best) {
      best = rate;
      best_k = ks[i];
    }
  }
  EXPECT_EQ(result.argmin_k, best_k);
  EXPECT_EQ(result.min_rate, best);
}

TEST(Sweep, ParallelMatchesSequential)
{
  const auto & data = testing::wdbc();
  const auto s = split(data, SplitSpec{.seed = 3});
  std::vector<std::size_t> ks(31);
  std::iota(ks.begin(), ks.end(), 1);
  const auto metric = fit_metric(CaseId::kExpectedTransform, s.train);
  const auto one = sweep_k(s.train, s.validation, metric, ks, 1);
  const auto many = sweep_k(s.train, s.validation, metric, ks, 4);
  ASSERT_EQ(one.curve.size(), many.curve.size());
  for (std::size_t i = 0; i < ks.size(); ++i) {
    EXPECT_EQ(one.curve[i].misclassification_rate, many.curve[i].misclassification_rate);
  }
  EXPECT_EQ(one.argmin_k, many.argmin_k);
}

TEST(Sweep, AgreesWithPerKFit)
{
  const auto & data = testing::wdbc();
  const auto s = split(data, SplitSpec{.seed = 5});
  const std::vector<std::size_t> ks{1, 4, 13, 30};
  const auto result = sweep_k(s.train, s.validation, RawCosine{}, ks);
  for (std::size_t i = 0; i < ks.size(); ++i) {
    const auto model = fit(s.train, KnnConfig{.k = ks[i]});
    std::size_t wrong = 0;
    for (const auto & q : s.validation) {
      wrong += model.predict(q.features) != q.label;
    }
    EXPECT_EQ(result.curve[i].misclassification_rate, static_cast<double>(wrong) / s.validation.size());
  }
}

TEST(Sweep, Errors)
{
  const std::vector<LabeledPoint> train{pt({1, 0}, kNeg, 1), pt({0, 1}, kPos, 2)};
  const std::vector<LabeledPoint> validation{pt({1, 0.1}, kNeg, 3)};
  EXPECT_THROW(sweep_k(train, validation, RawCosine{}, std::vector<std::size_t>{}), InputError);
  EXPECT_THROW(sweep_k(train, validation, RawCosine{}, std::vector<std::size_t>{3}), InputError);
}

}  // namespace
}  // namespace vacos
