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

#ifndef VACOS_RANDOM_HPP_
#define VACOS_RANDOM_HPP_

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <utility>

namespace vacos
{

/// Seeded generator whose output is pinned across platforms.
///
/// The engine is std::mt19937_64, whose sequence is fixed by the C++ standard.
/// Standard distributions are implementation-defined, so every derived
/// variate is produced here by hand:
///
///   uniform01  = ((raw >> 11) + 0.5) * 2^-53          (open interval (0, 1))
///   normal     = Box-Muller: r = sqrt(-2 ln u1), z0 = r cos(2 pi u2),
///                z1 = r sin(2 pi u2); z0 is returned first and z1 cached
///   below(n)   = rejection sampling on raw 64-bit draws (no modulo bias)
///   shuffle    = Fisher-Yates from the back, j = below(i + 1)
///
/// Normal variates depend on the platform's log/sqrt/cos/sin; on IEEE-754
/// hosts with a correctly rounded libm these agree bit-for-bit.
class Rng
{
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }
  double uniform01();
  double standard_normal();
  /// Uniform integer in [0, bound). `bound` must be > 0.
  std::uint64_t below(std::uint64_t bound);

  template <typename T>
  void shuffle(std::span<T> items)
  {
    for (std::size_t i = items.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(below(i));
      using std::swap;
      swap(items[i - 1], items[j]);
    }
  }

private:
  std::mt19937_64 engine_;
  std::optional<double> cached_normal_;
};

}  // namespace vacos

#endif  // VACOS_RANDOM_HPP_
