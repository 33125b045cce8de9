/*
 * Copyright 2026 The Povex Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef POVEX_ENGINE_PARALLEL_H_
#define POVEX_ENGINE_PARALLEL_H_

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

#include "absl/status/status.h"

namespace povex::engine {

// Runs fn(i) for i in [0, count) on up to `workers` threads. Items are claimed
// dynamically; results must be written to per-item slots. Returns the error of
// the lowest failing index, so the outcome does not depend on scheduling.
inline absl::Status ParallelFor(size_t count, int workers,
                                const std::function<absl::Status(size_t)>& fn) {
  std::vector<absl::Status> statuses(count);
  const size_t threads =
      std::min<size_t>(count, static_cast<size_t>(workers < 1 ? 1 : workers));
  if (threads <= 1) {
    for (size_t i = 0; i < count; ++i) {
      statuses[i] = fn(i);
      if (!statuses[i].ok()) return statuses[i];
    }
    return absl::OkStatus();
  }
  std::atomic<size_t> next{0};
  std::atomic<size_t> first_failure{count};
  auto run = [&] {
    for (;;) {
      const size_t i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= count) return;
      // Items below a failure still run so the reported error is stable.
      if (i > first_failure.load(std::memory_order_relaxed)) continue;
      statuses[i] = fn(i);
      if (!statuses[i].ok()) {
        size_t seen = first_failure.load(std::memory_order_relaxed);
        while (i < seen && !first_failure.compare_exchange_weak(seen, i)) {
        }
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(threads - 1);
  for (size_t t = 1; t < threads; ++t) pool.emplace_back(run);
  run();
  for (auto& t : pool) t.join();
  for (const auto& s : statuses) {
    if (!s.ok()) return s;
  }
  return absl::OkStatus();
}

}  // namespace povex::engine

#endif  // POVEX_ENGINE_PARALLEL_H_
