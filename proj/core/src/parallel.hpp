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

#ifndef VACOS_SRC_PARALLEL_HPP_
#define VACOS_SRC_PARALLEL_HPP_

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace vacos::detail
{

/// Calls fn(i) for i in [0, n) across `jobs` threads in contiguous blocks.
/// fn must only write to slot i of its outputs. The first exception by index
/// is rethrown after all threads join, so failures are reported the same way
/// regardless of scheduling.
template <typename Fn>
void parallel_for(std::size_t n, unsigned jobs, Fn && fn)
{
  if (jobs <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) {
      fn(i);
    }
    return;
  }
  const std::size_t workers = std::min<std::size_t>(jobs, n);
  const std::size_t block = (n + workers - 1) / workers;

  std::mutex mu;
  std::size_t failed_index = n;
  std::exception_ptr failure;

  std::vector<std::jthread> threads;
  threads.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = w * block;
    const std::size_t end = std::min(n, begin + block);
    threads.emplace_back([&, begin, end] {
      for (std::size_t i = begin; i < end; ++i) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(mu);
          if (i < failed_index) {
            failed_index = i;
            failure = std::current_exception();
          }
          return;
        }
      }
    });
  }
  threads.clear();
  if (failure) {
    std::rethrow_exception(failure);
  }
}

}  // namespace vacos::detail

#endif  // VACOS_SRC_PARALLEL_HPP_
