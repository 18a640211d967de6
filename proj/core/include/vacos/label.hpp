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

#ifndef VACOS_LABEL_HPP_
#define VACOS_LABEL_HPP_

#include <cstdint>

namespace vacos
{

/// Binary class. Reports index negative as row 0 and positive as row 1.
enum class Label : std::uint8_t
{
  kNegative = 0,
  kPositive = 1,
};

constexpr int index_of(Label label) noexcept { return static_cast<int>(label); }

constexpr Label other(Label label) noexcept
{
  return label == Label::kPositive ? Label::kNegative : Label::kPositive;
}

constexpr const char * to_string(Label label) noexcept
{
  return label == Label::kPositive ? "positive" : "negative";
}

}  // namespace vacos

#endif  // VACOS_LABEL_HPP_
