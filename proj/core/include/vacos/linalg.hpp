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

#ifndef VACOS_LINALG_HPP_
#define VACOS_LINALG_HPP_

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace vacos
{

/// A p-dimensional real observation.
using FeatureVector = std::vector<double>;

/// Dense row-major matrix of doubles.
///
/// Sized for the small problems this library deals with (p up to a few
/// hundred); no expression templates, no aliasing tricks.
class Matrix
{
public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  /// Throws InputError if `entries.size() != rows * cols` or any entry is not finite.
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> entries);

  static Matrix identity(std::size_t n);
  static Matrix diagonal(std::span<const double> diag);
  /// Builds from nested rows; every row must have the same length.
  static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool is_square() const noexcept { return rows_ == cols_; }

  double & operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

  std::span<const double> row(std::size_t r) const noexcept
  {
    return {data_.data() + r * cols_, cols_};
  }
  std::span<const double> entries() const noexcept { return data_; }

  friend bool operator==(const Matrix &, const Matrix &) = default;

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix transpose(const Matrix & m);
Matrix multiply(const Matrix & a, const Matrix & b);
/// `alpha * a + beta * b`, elementwise.
Matrix linear_combination(double alpha, const Matrix & a, double beta, const Matrix & b);
/// Largest absolute entry.
double max_abs(const Matrix & m) noexcept;
/// Largest absolute row sum (the induced infinity norm).
double norm_inf(const Matrix & m) noexcept;
/// Largest absolute elementwise difference; dimensions must agree.
double max_abs_diff(const Matrix & a, const Matrix & b);

enum class EstimationMode
{
  kPopulation,  ///< divisor n
  kSample,      ///< divisor n - 1
};

const char * to_string(EstimationMode mode) noexcept;

/// Symmetric p x p covariance estimate together with how it was obtained.
class CovarianceMatrix
{
public:
  /// Wraps an existing matrix. Throws InputError when the matrix is not
  /// square, is empty, is asymmetric beyond 1e-10 absolute, or when
  /// `sample_count` is too small for `mode`.
  CovarianceMatrix(Matrix matrix, EstimationMode mode, std::size_t sample_count);

  const Matrix & matrix() const noexcept { return matrix_; }
  EstimationMode mode() const noexcept { return mode_; }
  std::size_t sample_count() const noexcept { return sample_count_; }
  std::size_t dim() const noexcept { return matrix_.rows(); }

private:
  Matrix matrix_;
  EstimationMode mode_;
  std::size_t sample_count_;
};

/// Square lower-triangular matrix with a strictly positive diagonal.
class LowerTriangular
{
public:
  /// Throws InputError unless every strictly-upper entry is exactly zero and
  /// every diagonal entry is > 0.
  explicit LowerTriangular(Matrix matrix);

  const Matrix & matrix() const noexcept { return matrix_; }
  std::size_t dim() const noexcept { return matrix_.rows(); }

private:
  Matrix matrix_;
};

FeatureVector mean_vector(std::span<const FeatureVector> samples);

/// Covariance of `samples` about their mean. The result is exactly symmetric.
CovarianceMatrix covariance(std::span<const FeatureVector> samples, EstimationMode mode);

struct CholeskyOptions
{
  /// Adds 1e-10 * trace / p to the diagonal before factorizing. Off by default
  /// so rank-deficient inputs fail loudly instead of being silently regularized.
  bool jitter = false;
};

inline constexpr double kCholeskyJitter = 1e-10;
inline constexpr double kPivotTolerance = 1e-12;

/// Left-looking Cholesky factorization without pivoting: returns L with L L^T = C.
///
/// Throws NotPositiveDefinite naming the first pivot at or below
/// 1e-12 * max_diagonal.
LowerTriangular cholesky_lower(const CovarianceMatrix & c, CholeskyOptions options = {});

/// Inverse of a lower-triangular matrix by forward substitution, column by column.
LowerTriangular invert_lower_triangular(const LowerTriangular & l);

/// Matrix-vector product m x. Throws DimensionMismatch if `m.cols() != x.size()`.
FeatureVector multiply(const Matrix & m, std::span<const double> x);

}  // namespace vacos

#endif  // VACOS_LINALG_HPP_
