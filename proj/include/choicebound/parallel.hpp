// Copyright 2026 The ChoiceBound Authors
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

#ifndef CHOICEBOUND_PARALLEL_HPP_
#define CHOICEBOUND_PARALLEL_HPP_

#include <atomic>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace cb::parallel {

/// Worker count: CHOICEBOUND_WORKERS when set, otherwise 1 (experiments are
/// deterministic either way; results are merged by index).
inline int worker_count() {
  if (const char* env = std::getenv("CHOICEBOUND_WORKERS")) {
    int w = std::atoi(env);
    if (w >= 1) return w;
  }
  return 1;
}

/// Runs fn(i) for i in [0, count) on a fixed pool. Each task must write only
/// to its own output slot; completion order never affects results.
inline void for_each_index(std::size_t count,
                           const std::function<void(std::size_t)>& fn,
                           int workers = worker_count()) {
  if (workers <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        std::size_t i = next.fetch_add(1);
        if (i >= count || failed.load()) return;
        try {
          fn(i);
        } catch (...) {
          if (!failed.exchange(true)) error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace cb::parallel

#endif  // CHOICEBOUND_PARALLEL_HPP_
