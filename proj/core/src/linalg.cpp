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

#include "vacos/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "vacos/error.hpp"

namespace vacos
{

namespace
{

void require_same_shape(const Matrix & a, const Matrix & b, const char * what)
{
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionMismatch(
      std::string(what) + ": shapes " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
      " and " + std::to_string(b.rows()) + "x" + std::to_string(b.cols()) + " differ");
  }
}

std::size_t checked_dimension(std::span<const FeatureVector> samples)
{
  if (samples.empty()) {
    throw InputError("no samples");
  }
  const std::size_t p = samples.front().size();
  if (p == 0) {
    throw InputError("samples have dimension 0");
  }
  for (std::size_t i = 1; i < samples.size(); ++i) {
    if (samples[i].size() != p) {
      throw DimensionMismatch(
        "sample " + std::to_string(i) + " has dimension " + std::to_string(samples[i].size()) +
        ", expected " + std::to_string(p));
    }
  }
  return p;
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
: rows_(rows), cols_(cols), data_(rows * cols, fill)
{
}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> entries)
: rows_(rows), cols_(cols), data_(std::move(entries))
{
  if (data_.size() != rows_ * cols_) {
    throw InputError(
      "matrix " + std::to_string(rows_) + "x" + std::to_string(cols_) + " needs " +
      std::to_string(rows_ * cols_) + " entries, got " + std::to_string(data_.size()));
  }
  for (double v : data_) {
    if (!std::isfinite(v)) {
      throw InputError("matrix entry is not finite");
    }
  }
}

Matrix Matrix::identity(std::size_t n)
{
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    m(i, i) = 1.0;
  }
  return m;
}

Matrix Matrix::diagonal(std::span<const double> diag)
{
  Matrix m(diag.size(), diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) {
    m(i, i) = diag[i];
  }
  return m;
}

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows)
{
  const std::size_t r = rows.size();
  const std::size_t c = r == 0 ? 0 : rows.begin()->size();
  std::vector<double> entries;
  entries.reserve(r * c);
  for (const auto & row : rows) {
    if (row.size() != c) {
      throw InputError("ragged rows in matrix literal");
    }
    entries.insert(entries.end(), row.begin(), row.end());
  }
  return Matrix(r, c, std::move(entries));
}

Matrix transpose(const Matrix & m)
{
  Matrix t(m.cols(), m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      t(j, i) = m(i, j);
    }
  }
  return t;
}

Matrix multiply(const Matrix & a, const Matrix & b)
{
  if (a.cols() != b.rows()) {
    throw DimensionMismatch(
      "multiply: inner dimensions " + std::to_string(a.cols()) + " and " +
      std::to_string(b.rows()) + " differ");
  }
  Matrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) {
        continue;
      }
      for (std::size_t j = 0; j < b.cols(); ++j) {
        out(i, j) += aik * b(k, j);
      }
    }
  }
  return out;
}

Matrix linear_combination(double alpha, const Matrix & a, double beta, const Matrix & b)
{
  require_same_shape(a, b, "linear_combination");
  Matrix out(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) {
      out(i, j) = alpha * a(i, j) + beta * b(i, j);
    }
  }
  return out;
}

double max_abs(const Matrix & m) noexcept
{
  double best = 0.0;
  for (double v : m.entries()) {
    best = std::max(best, std::abs(v));
  }
  return best;
}

double norm_inf(const Matrix & m) noexcept
{
  double best = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    double sum = 0.0;
    for (double v : m.row(i)) {
      sum += std::abs(v);
    }
    best = std::max(best, sum);
  }
  return best;
}

double max_abs_diff(const Matrix & a, const Matrix & b)
{
  require_same_shape(a, b, "max_abs_diff");
  double best = 0.0;
  for (std::size_t i = 0; i < a.entries().size(); ++i) {
    best = std::max(best, std::abs(a.entries()[i] - b.entries()[i]));
  }
  return best;
}

const char * to_string(EstimationMode mode) noexcept
{
  switch (mode) {
    case EstimationMode::kPopulation:
      return "population";
    case EstimationMode::kSample:
      return "sample";
  }
  return "unknown";
}

CovarianceMatrix::CovarianceMatrix(Matrix matrix, EstimationMode mode, std::size_t sample_count)
: matrix_(std::move(matrix)), mode_(mode), sample_count_(sample_count)
{
  if (!matrix_.is_square() || matrix_.rows() == 0) {
    throw InputError("covariance matrix must be square with dimension >= 1");
  }
  const std::size_t min_count = mode_ == EstimationMode::kSample ? 2 : 1;
  if (sample_count_ < min_count) {
    throw InputError(
      std::string(to_string(mode_)) + " covariance needs at least " + std::to_string(min_count) +
      " observations, got " + std::to_string(sample_count_));
  }
  const std::size_t p = matrix_.rows();
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = i + 1; j < p; ++j) {
      if (std::abs(matrix_(i, j) - matrix_(j, i)) > 1e-10) {
        throw InputError(
          "covariance matrix is not symmetric at (" + std::to_string(i) + "," +
          std::to_string(j) + ")");
      }
    }
  }
}

LowerTriangular::LowerTriangular(Matrix matrix) : matrix_(std::move(matrix))
{
  if (!matrix_.is_square() || matrix_.rows() == 0) {
    throw InputError("lower-triangular matrix must be square with dimension >= 1");
  }
  const std::size_t n = matrix_.rows();
  for (std::size_t i = 0; i < n; ++i) {
    if (!(matrix_(i, i) > 0.0)) {
      throw InputError("lower-triangular diagonal entry " + std::to_string(i) + " is not positive");
    }
    for (std::size_t j = i + 1; j < n; ++j) {
      if (matrix_(i, j) != 0.0) {
        throw InputError(
          "entry (" + std::to_string(i) + "," + std::to_string(j) +
          ") above the diagonal is nonzero");
      }
    }
  }
}

FeatureVector mean_vector(std::span<const FeatureVector> samples)
{
  const std::size_t p = checked_dimension(samples);
  FeatureVector mean(p, 0.0);
  for (const auto & x : samples) {
    for (std::size_t j = 0; j < p; ++j) {
      mean[j] += x[j];
    }
  }
  const double n = static_cast<double>(samples.size());
  for (double & m : mean) {
    m /= n;
  }
  return mean;
}

CovarianceMatrix covariance(std::span<const FeatureVector> samples, EstimationMode mode)
{
  const std::size_t p = checked_dimension(samples);
  const std::size_t n = samples.size();
  if (mode == EstimationMode::kSample && n < 2) {
    throw InputError("sample covariance needs at least 2 observations, got " + std::to_string(n));
  }
  const FeatureVector mu = mean_vector(samples);

  Matrix acc(p, p);
  FeatureVector centered(p);
  for (const auto & x : samples) {
    for (std::size_t j = 0; j < p; ++j) {
      centered[j] = x[j] - mu[j];
    }
    for (std::size_t i = 0; i < p; ++i) {
      for (std::size_t j = 0; j <= i; ++j) {
        acc(i, j) += centered[i] * centered[j];
      }
    }
  }

  const double divisor = static_cast<double>(mode == EstimationMode::kSample ? n - 1 : n);
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      acc(i, j) /= divisor;
      acc(j, i) = acc(i, j);
    }
  }
  return CovarianceMatrix(std::move(acc), mode, n);
}

LowerTriangular cholesky_lower(const CovarianceMatrix & c, CholeskyOptions options)
{
  Matrix a = c.matrix();
  const std::size_t n = a.rows();

  if (options.jitter) {
    double trace = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      trace += a(i, i);
    }
    const double shift = kCholeskyJitter * trace / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
      a(i, i) += shift;
    }
  }

  double max_diag = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    max_diag = std::max(max_diag, a(i, i));
  }
  const double tol = kPivotTolerance * max_diag;

  Matrix l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    // Column j only reads the already-finished columns 0..j-1.
    double pivot = a(j, j);
    for (std::size_t k = 0; k < j; ++k) {
      pivot -= l(j, k) * l(j, k);
    }
    if (!(pivot > tol)) {
      throw NotPositiveDefinite(j, pivot);
    }
    const double ljj = std::sqrt(pivot);
    l(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) {
        s -= l(i, k) * l(j, k);
      }
      l(i, j) = s / ljj;
    }
  }
  return LowerTriangular(std::move(l));
}

LowerTriangular invert_lower_triangular(const LowerTriangular & lower)
{
  const Matrix & l = lower.matrix();
  const std::size_t n = l.rows();
  Matrix inv(n, n);
  // Solve L x = e_j for each unit vector; x is zero above row j.
  for (std::size_t j = 0; j < n; ++j) {
    inv(j, j) = 1.0 / l(j, j);
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = 0.0;
      for (std::size_t k = j; k < i; ++k) {
        s -= l(i, k) * inv(k, j);
      }
      inv(i, j) = s / l(i, i);
    }
  }
  return LowerTriangular(std::move(inv));
}

FeatureVector multiply(const Matrix & m, std::span<const double> x)
{
  if (m.cols() != x.size()) {
    throw DimensionMismatch(
      "multiply: matrix has " + std::to_string(m.cols()) + " columns, vector has " +
      std::to_string(x.size()) + " entries");
  }
  FeatureVector out(m.rows(), 0.0);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    double s = 0.0;
    const auto row = m.row(i);
    for (std::size_t j = 0; j < x.size(); ++j) {
      s += row[j] * x[j];
    }
    out[i] = s;
  }
  return out;
}

}  // namespace vacos
