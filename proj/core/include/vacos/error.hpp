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

#ifndef VACOS_ERROR_HPP_
#define VACOS_ERROR_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace vacos
{

/// Base of every exception thrown by the library.
class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input: bad files, wrong dimensions, violated preconditions.
class InputError : public Error
{
public:
  using Error::Error;
};

class DimensionMismatch : public InputError
{
public:
  using InputError::InputError;
};

/// A numerical routine could not produce a valid result.
class NumericalError : public Error
{
public:
  using Error::Error;
};

/// Cholesky factorization hit a pivot at or below tolerance.
class NotPositiveDefinite : public NumericalError
{
public:
  NotPositiveDefinite(std::size_t pivot_index, double pivot_value, std::string context = {})
  : NumericalError(make_message(pivot_index, pivot_value, context)),
    pivot_index_(pivot_index),
    pivot_value_(pivot_value),
    context_(std::move(context))
  {
  }

  std::size_t pivot_index() const noexcept { return pivot_index_; }
  double pivot_value() const noexcept { return pivot_value_; }
  const std::string & context() const noexcept { return context_; }

private:
  static std::string make_message(std::size_t idx, double value, const std::string & context)
  {
    std::string msg = "matrix is not positive definite: pivot " + std::to_string(idx) +
                      " = " + std::to_string(value);
    if (!context.empty()) {
      msg = context + ": " + msg;
    }
    return msg;
  }

  std::size_t pivot_index_;
  double pivot_value_;
  std::string context_;
};

/// A cosine was requested for a vector whose norm is effectively zero.
class ZeroVector : public NumericalError
{
public:
  using NumericalError::NumericalError;
};

}  // namespace vacos

#endif  // VACOS_ERROR_HPP_
