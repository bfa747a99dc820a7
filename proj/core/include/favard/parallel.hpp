// SPDX-License-Identifier: MIT
// Minimal fork-join helpers used by the sharded kernels.
#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace favard {

// Worker count from FAVARD_WORKERS, falling back to 1.
int default_workers();

// Splits [0, n) into `workers` contiguous shards and calls fn(shard, begin, end)
// for each one. Shard boundaries depend only on n and workers.
template <class Fn>
void parallel_shards(std::size_t n, int workers, Fn&& fn) {
  const std::size_t w = static_cast<std::size_t>(std::max(1, workers));
  const std::size_t shards = std::min(w, std::max<std::size_t>(n, 1));
  auto bounds = [&](std::size_t s) { return n * s / shards; };
  if (shards == 1) {
    fn(std::size_t{0}, std::size_t{0}, n);
    return;
  }
  std::vector<std::thread> pool;
  std::exception_ptr first;
  std::mutex guard;
  pool.reserve(shards);
  for (std::size_t s = 0; s < shards; ++s) {
    pool.emplace_back([&, s] {
      try {
        fn(s, bounds(s), bounds(s + 1));
      } catch (...) {
        std::lock_guard<std::mutex> lock(guard);
        if (!first) first = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first) std::rethrow_exception(first);
}

// Calls fn(i) for every i in [0, n) across the worker shards.
template <class Fn>
void parallel_for(std::size_t n, int workers, Fn&& fn) {
  parallel_shards(n, workers, [&](std::size_t, std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) fn(i);
  });
}

// Pairwise summation; the result depends only on the order of `v`.
double pairwise_sum(const double* v, std::size_t n);

}  // namespace favard
