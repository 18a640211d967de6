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

#ifndef VACOS_DATA_HPP_
#define VACOS_DATA_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "vacos/error.hpp"
#include "vacos/knn.hpp"
#include "vacos/label.hpp"
#include "vacos/linalg.hpp"

namespace vacos
{

/// Labeled binary-class data with uniform dimensionality and no missing values.
struct Dataset
{
  std::vector<LabeledPoint> points;
  std::vector<std::string> feature_names;
  std::string positive_name;
  std::string negative_name;
  /// Source path or generator description.
  std::string provenance;
  /// Non-fatal ingestion notes (e.g. duplicate ids).
  std::vector<std::string> warnings;

  std::size_t size() const noexcept { return points.size(); }
  std::size_t dim() const noexcept { return feature_names.size(); }
  std::size_t count(Label label) const noexcept;
  const std::string & label_name(Label label) const noexcept
  {
    return label == Label::kPositive ? positive_name : negative_name;
  }
  /// Feature vectors of every point with `label`, in dataset order.
  std::vector<FeatureVector> features_of(Label label) const;
};

/// Parse error carrying the 1-based line number of the offending record.
class ParseError : public InputError
{
public:
  ParseError(const std::string & source, std::size_t line, const std::string & what);
  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

/// The 30 WDBC feature names in file order.
const std::vector<std::string> & wdbc_feature_names();

/// Reads the UCI WDBC layout: id, diagnosis (M|B), 30 features per line,
/// comma-separated, no quoting. A header line is accepted and detected by a
/// non-numeric third field. M maps to positive, B to negative.
Dataset load_wdbc(const std::filesystem::path & path);
Dataset parse_wdbc(std::istream & in, const std::string & source = "<stream>");

struct GenericCsvOptions
{
  std::string label_column;
  /// Label value mapped to Label::kPositive.
  std::string positive_name;
  /// Optional column of integer record ids; when empty, ids are 1-based row numbers.
  std::string id_column;
};

/// Reads a headed CSV (RFC 4180 quoting). Every column other than the label
/// and id columns must be numeric and becomes a feature.
Dataset load_generic_csv(const std::filesystem::path & path, const GenericCsvOptions & options);
Dataset parse_generic_csv(std::istream & in, const GenericCsvOptions & options, const std::string & source = "<stream>");

/// Writes `id,label,<features...>` with shortest round-trip number formatting,
/// readable by load_generic_csv with label_column "label" and id_column "id".
void write_csv(const Dataset & data, std::ostream & out);

struct GaussianSpec
{
  FeatureVector mean;
  CovarianceMatrix covariance;
  std::size_t n = 1;
  std::uint64_t seed = 0;
};

/// n draws of mean + L z, with L the Cholesky factor of the covariance and z
/// standard normal from Rng(seed) (see random.hpp for the pinned algorithm).
std::vector<FeatureVector> generate_gaussian(const GaussianSpec & spec);

struct Fig1Options
{
  double variance_x = 1.0;
  double variance_y = 1.0;
  double correlation = 0.9;
  std::size_t sample_size = 400;
  std::size_t max_attempts = 200000;
  /// Squared Mahalanobis radius bounding B and C (inside the bulk).
  double inlier_radius_sq = 2.0;
  /// Squared Mahalanobis radius A must exceed (chi-square, 2 dof, 99%).
  double outlier_radius_sq = 9.21;
  /// Largest angle, in degrees, between B or C and the major axis line.
  double axis_tolerance_deg = 30.0;
  /// Minimum cosine gap required on both sides of the flip.
  double margin = 1e-3;
};

/// Three points around a zero-mean correlated Gaussian where plain cosine
/// calls the outlier A the closer match to B, while cosine after whitening
/// by the distribution's inverse Cholesky factor picks C, which comes from
/// the same distribution as B.
struct Fig1Counterexample
{
  /// False when the covariance is isotropic: whitening is then a scaling and
  /// cannot change any cosine, so no flip exists and no search is run.
  bool applicable = false;
  std::uint64_t seed = 0;
  Matrix covariance;
  FeatureVector a, b, c;
  double plain_ab = 0.0;
  double plain_bc = 0.0;
  double adjusted_ab = 0.0;
  double adjusted_bc = 0.0;
  double mahalanobis_sq_a = 0.0;
  double mahalanobis_sq_b = 0.0;
  double mahalanobis_sq_c = 0.0;
  std::size_t attempts = 0;

  /// Plain cosine prefers A, adjusted cosine prefers C.
  bool flipped() const noexcept { return plain_ab > plain_bc && adjusted_bc > adjusted_ab; }
};

/// Seeded search for the ranking flip. Throws NumericalError if no flip is
/// found within `max_attempts` on a non-isotropic covariance.
Fig1Counterexample fig1_counterexample(std::uint64_t seed, const Fig1Options & options = {});

}  // namespace vacos

#endif  // VACOS_DATA_HPP_
