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

#include "vacos/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <numbers>
#include <optional>
#include <ostream>
#include <set>
#include <string_view>
#include <unordered_map>

#include "vacos/error.hpp"
#include "vacos/metrics.hpp"
#include "vacos/random.hpp"

namespace vacos
{

namespace
{

std::string_view trim(std::string_view s)
{
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) {
    return {};
  }
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::optional<double> parse_double(std::string_view text)
{
  text = trim(text);
  if (text.empty()) {
    return std::nullopt;
  }
  if (text.front() == '+') {
    text.remove_prefix(1);
  }
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(value)) {
    return std::nullopt;
  }
  return value;
}

std::optional<std::uint64_t> parse_id(std::string_view text)
{
  text = trim(text);
  std::uint64_t value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
    return std::nullopt;
  }
  return value;
}

std::vector<std::string_view> split_plain(std::string_view line)
{
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

std::ifstream open_or_throw(const std::filesystem::path & path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw InputError("cannot open " + path.string());
  }
  return in;
}

void note_duplicate_ids(Dataset & data)
{
  std::unordered_map<std::uint64_t, std::size_t> seen;
  for (std::size_t i = 0; i < data.points.size(); ++i) {
    const auto [it, inserted] = seen.emplace(data.points[i].id, i);
    if (!inserted) {
      data.warnings.push_back(
        "duplicate id " + std::to_string(data.points[i].id) + " (records " +
        std::to_string(it->second + 1) + " and " + std::to_string(i + 1) + ")");
    }
  }
}

void require_both_classes(const Dataset & data, const std::string & source)
{
  if (data.count(Label::kPositive) == 0 || data.count(Label::kNegative) == 0) {
    throw InputError(source + ": dataset must contain at least one point of each class");
  }
}

/// Minimal RFC 4180 record reader: quoted fields may hold commas, doubled
/// quotes and line breaks. Tracks the physical line where each record starts.
class CsvReader
{
public:
  CsvReader(std::istream & in, std::string source) : in_(in), source_(std::move(source)) {}

  bool next(std::vector<std::string> & fields)
  {
    fields.clear();
    std::string line;
    while (true) {
      if (!std::getline(in_, line)) {
        return false;
      }
      ++line_no_;
      if (!trim(line).empty()) {
        break;
      }
    }
    record_line_ = line_no_;

    std::string field;
    bool quoted = false;
    std::size_t i = 0;
    while (true) {
      if (i == line.size()) {
        if (quoted) {
          std::string more;
          if (!std::getline(in_, more)) {
            throw ParseError(source_, record_line_, "unterminated quoted field");
          }
          ++line_no_;
          field.push_back('\n');
          line = std::move(more);
          i = 0;
          continue;
        }
        if (!field.empty() && field.back() == '\r') {
          field.pop_back();
        }
        fields.push_back(std::move(field));
        return true;
      }
      const char ch = line[i++];
      if (quoted) {
        if (ch == '"') {
          if (i < line.size() && line[i] == '"') {
            field.push_back('"');
            ++i;
          } else {
            quoted = false;
          }
        } else {
          field.push_back(ch);
        }
      } else if (ch == '"') {
        quoted = true;
      } else if (ch == ',') {
        fields.push_back(std::move(field));
        field.clear();
      } else {
        field.push_back(ch);
      }
    }
  }

  std::size_t record_line() const noexcept { return record_line_; }

private:
  std::istream & in_;
  std::string source_;
  std::size_t line_no_ = 0;
  std::size_t record_line_ = 0;
};

bool is_missing_token(std::string_view s)
{
  s = trim(s);
  return s.empty() || s == "NA" || s == "N/A" || s == "NaN" || s == "nan" || s == "null" || s == "?";
}

void write_field(std::ostream & out, const std::string & s)
{
  if (s.find_first_of(",\"\n\r") == std::string::npos) {
    out << s;
    return;
  }
  out << '"';
  for (char ch : s) {
    if (ch == '"') {
      out << '"';
    }
    out << ch;
  }
  out << '"';
}

}  // namespace

ParseError::ParseError(const std::string & source, std::size_t line, const std::string & what)
: InputError(source + ":" + std::to_string(line) + ": " + what), line_(line)
{
}

std::size_t Dataset::count(Label label) const noexcept
{
  return static_cast<std::size_t>(std::count_if(
    points.begin(), points.end(), [label](const LabeledPoint & p) { return p.label == label; }));
}

std::vector<FeatureVector> Dataset::features_of(Label label) const
{
  std::vector<FeatureVector> out;
  for (const auto & p : points) {
    if (p.label == label) {
      out.push_back(p.features);
    }
  }
  return out;
}

const std::vector<std::string> & wdbc_feature_names()
{
  static const std::vector<std::string> names = [] {
    const char * base[] = {
      "radius",    "texture",     "perimeter",      "area",     "smoothness",
      "compactness", "concavity", "concave_points", "symmetry", "fractal_dimension"};
    std::vector<std::string> out;
    for (const char * suffix : {"mean", "se", "worst"}) {
      for (const char * b : base) {
        out.push_back(std::string(b) + "_" + suffix);
      }
    }
    return out;
  }();
  return names;
}

Dataset parse_wdbc(std::istream & in, const std::string & source)
{
  constexpr std::size_t kFields = 32;

  Dataset data;
  data.feature_names = wdbc_feature_names();
  data.positive_name = "M";
  data.negative_name = "B";
  data.provenance = source;

  std::string line;
  std::size_t line_no = 0;
  bool first_record = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) {
      continue;
    }
    const auto fields = split_plain(trim(line));
    if (fields.size() != kFields) {
      throw ParseError(
        source, line_no,
        "expected " + std::to_string(kFields) + " fields, found " + std::to_string(fields.size()));
    }
    if (first_record) {
      first_record = false;
      if (!parse_double(fields[2])) {
        std::vector<std::string> names;
        for (std::size_t j = 2; j < kFields; ++j) {
          names.emplace_back(trim(fields[j]));
        }
        data.feature_names = std::move(names);
        continue;
      }
    }

    LabeledPoint point;
    const auto id = parse_id(fields[0]);
    if (!id) {
      throw ParseError(source, line_no, "invalid id '" + std::string(trim(fields[0])) + "'");
    }
    point.id = *id;

    const auto diagnosis = trim(fields[1]);
    if (diagnosis == "M") {
      point.label = Label::kPositive;
    } else if (diagnosis == "B") {
      point.label = Label::kNegative;
    } else {
      throw ParseError(source, line_no, "unknown diagnosis code '" + std::string(diagnosis) + "'");
    }

    point.features.reserve(kFields - 2);
    for (std::size_t j = 2; j < kFields; ++j) {
      const auto value = parse_double(fields[j]);
      if (!value) {
        throw ParseError(
          source, line_no,
          "non-numeric value '" + std::string(trim(fields[j])) + "' in field " + std::to_string(j + 1));
      }
      point.features.push_back(*value);
    }
    data.points.push_back(std::move(point));
  }

  if (data.points.empty()) {
    throw InputError(source + ": no records");
  }
  require_both_classes(data, source);
  note_duplicate_ids(data);
  return data;
}

Dataset load_wdbc(const std::filesystem::path & path)
{
  auto in = open_or_throw(path);
  return parse_wdbc(in, path.string());
}

Dataset parse_generic_csv(std::istream & in, const GenericCsvOptions & options, const std::string & source)
{
  CsvReader reader(in, source);
  std::vector<std::string> header;
  if (!reader.next(header)) {
    throw InputError(source + ": empty file (a header row is required)");
  }
  for (auto & name : header) {
    name = std::string(trim(name));
  }

  const auto find_column = [&](const std::string & name) -> std::optional<std::size_t> {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
      return std::nullopt;
    }
    return static_cast<std::size_t>(it - header.begin());
  };

  const auto label_col = find_column(options.label_column);
  if (!label_col) {
    throw InputError(source + ": label column '" + options.label_column + "' not found");
  }
  std::optional<std::size_t> id_col;
  if (!options.id_column.empty()) {
    id_col = find_column(options.id_column);
    if (!id_col) {
      throw InputError(source + ": id column '" + options.id_column + "' not found");
    }
  }

  Dataset data;
  data.provenance = source;
  std::vector<std::size_t> feature_cols;
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (j != *label_col && (!id_col || j != *id_col)) {
      feature_cols.push_back(j);
      data.feature_names.push_back(header[j]);
    }
  }
  if (feature_cols.empty()) {
    throw InputError(source + ": no feature columns");
  }

  std::vector<std::string> raw_labels;
  std::set<std::string> distinct;
  std::vector<std::string> fields;
  std::size_t row = 0;
  while (reader.next(fields)) {
    ++row;
    const std::size_t line = reader.record_line();
    if (fields.size() != header.size()) {
      throw ParseError(
        source, line,
        "expected " + std::to_string(header.size()) + " fields, found " + std::to_string(fields.size()));
    }
    LabeledPoint point;
    if (id_col) {
      const auto id = parse_id(fields[*id_col]);
      if (!id) {
        throw ParseError(source, line, "invalid id '" + fields[*id_col] + "'");
      }
      point.id = *id;
    } else {
      point.id = row;
    }
    point.features.reserve(feature_cols.size());
    for (std::size_t col : feature_cols) {
      const auto & cell = fields[col];
      if (is_missing_token(cell)) {
        throw ParseError(source, line, "missing value in column '" + header[col] + "'");
      }
      const auto value = parse_double(cell);
      if (!value) {
        throw ParseError(source, line, "non-numeric value '" + cell + "' in column '" + header[col] + "'");
      }
      point.features.push_back(*value);
    }
    std::string label(trim(fields[*label_col]));
    if (label.empty()) {
      throw ParseError(source, line, "missing label");
    }
    distinct.insert(label);
    if (distinct.size() > 2) {
      throw ParseError(source, line, "more than two distinct label values (third: '" + label + "')");
    }
    point.label = label == options.positive_name ? Label::kPositive : Label::kNegative;
    raw_labels.push_back(std::move(label));
    data.points.push_back(std::move(point));
  }

  if (data.points.empty()) {
    throw InputError(source + ": no data rows");
  }
  if (!distinct.contains(options.positive_name)) {
    throw InputError(source + ": positive label '" + options.positive_name + "' does not occur");
  }
  if (distinct.size() != 2) {
    throw InputError(source + ": exactly two distinct label values are required");
  }
  data.positive_name = options.positive_name;
  for (const auto & name : distinct) {
    if (name != options.positive_name) {
      data.negative_name = name;
    }
  }
  note_duplicate_ids(data);
  return data;
}

Dataset load_generic_csv(const std::filesystem::path & path, const GenericCsvOptions & options)
{
  auto in = open_or_throw(path);
  return parse_generic_csv(in, options, path.string());
}

void write_csv(const Dataset & data, std::ostream & out)
{
  out << "id,label";
  for (const auto & name : data.feature_names) {
    out << ',';
    write_field(out, name);
  }
  out << '\n';
  char buf[64];
  for (const auto & p : data.points) {
    out << p.id << ',';
    write_field(out, data.label_name(p.label));
    for (double v : p.features) {
      const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
      out << ',' << std::string_view(buf, static_cast<std::size_t>(ptr - buf));
    }
    out << '\n';
  }
}

std::vector<FeatureVector> generate_gaussian(const GaussianSpec & spec)
{
  if (spec.n == 0) {
    throw InputError("generate_gaussian: n must be >= 1");
  }
  const std::size_t p = spec.covariance.dim();
  if (spec.mean.size() != p) {
    throw DimensionMismatch("generate_gaussian: mean and covariance dimensions differ");
  }
  const LowerTriangular factor = cholesky_lower(spec.covariance);
  const Matrix & l = factor.matrix();

  Rng rng(spec.seed);
  std::vector<FeatureVector> out;
  out.reserve(spec.n);
  FeatureVector z(p);
  for (std::size_t s = 0; s < spec.n; ++s) {
    for (double & zi : z) {
      zi = rng.standard_normal();
    }
    FeatureVector x = multiply(l, z);
    for (std::size_t i = 0; i < p; ++i) {
      x[i] += spec.mean[i];
    }
    out.push_back(std::move(x));
  }
  return out;
}

Fig1Counterexample fig1_counterexample(std::uint64_t seed, const Fig1Options & options)
{
  const double sx = options.variance_x;
  const double sy = options.variance_y;
  const double cov_xy = options.correlation * std::sqrt(sx * sy);
  Matrix sigma = Matrix::from_rows({{sx, cov_xy}, {cov_xy, sy}});

  Fig1Counterexample result;
  result.seed = seed;
  result.covariance = sigma;

  const bool isotropic = cov_xy == 0.0 && sx == sy;
  if (isotropic) {
    result.applicable = false;
    return result;
  }
  result.applicable = true;

  const CovarianceMatrix cov(sigma, EstimationMode::kPopulation, options.sample_size);
  const FeatureVector origin{0.0, 0.0};
  const auto transform = WhiteningTransform::from_covariance(cov, origin);

  // B and C come from the distribution itself; A is an off-distribution point.
  const auto draws = generate_gaussian(GaussianSpec{origin, cov, options.sample_size, seed});
  const double theta = 0.5 * std::atan2(2.0 * cov_xy, sx - sy);
  const FeatureVector axis{std::cos(theta), std::sin(theta)};
  const double min_axis_cos = std::cos(options.axis_tolerance_deg * std::numbers::pi / 180.0);
  std::vector<FeatureVector> inliers;
  for (const auto & x : draws) {
    if (
      mahalanobis_sq(x, origin, transform) <= options.inlier_radius_sq &&
      std::abs(cosine_similarity(x, axis).value()) >= min_axis_cos) {
      inliers.push_back(x);
    }
  }
  if (inliers.size() < 2) {
    throw NumericalError("fig1_counterexample: too few inliers drawn");
  }

  // Separate stream for the search so the sample itself matches generate_gaussian.
  Rng rng(seed ^ 0x9e3779b97f4a7c15ULL);
  const double box = 4.0 * std::sqrt(std::max(sx, sy));
  for (std::size_t attempt = 1; attempt <= options.max_attempts; ++attempt) {
    const auto & b = inliers[rng.below(inliers.size())];
    const auto & c = inliers[rng.below(inliers.size())];
    const FeatureVector a{box * (2.0 * rng.uniform01() - 1.0), box * (2.0 * rng.uniform01() - 1.0)};
    if (&b == &c || mahalanobis_sq(a, origin, transform) < options.outlier_radius_sq) {
      continue;
    }
    const double plain_ab = cosine_similarity(a, b).value();
    const double plain_bc = cosine_similarity(b, c).value();
    // Acute angles only, so all three vectors point into the same half-plane.
    if (plain_bc <= 0.0 || plain_ab < plain_bc + options.margin) {
      continue;
    }
    const double adjusted_ab = adjusted_cosine(a, b, transform).value();
    const double adjusted_bc = adjusted_cosine(b, c, transform).value();
    if (adjusted_bc < adjusted_ab + options.margin) {
      continue;
    }
    result.a = a;
    result.b = b;
    result.c = c;
    result.plain_ab = plain_ab;
    result.plain_bc = plain_bc;
    result.adjusted_ab = adjusted_ab;
    result.adjusted_bc = adjusted_bc;
    result.mahalanobis_sq_a = mahalanobis_sq(a, origin, transform);
    result.mahalanobis_sq_b = mahalanobis_sq(b, origin, transform);
    result.mahalanobis_sq_c = mahalanobis_sq(c, origin, transform);
    result.attempts = attempt;
    return result;
  }
  throw NumericalError(
    "fig1_counterexample: no ranking flip found in " + std::to_string(options.max_attempts) +
    " attempts");
}

}  // namespace vacos
