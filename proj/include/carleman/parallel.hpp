#pragma once

// Deterministic data-parallel loop.  Work is split into contiguous
// blocks, one per worker, so each index is always processed exactly
// once and writes to per-index slots never race.  Results are
// bit-identical at any thread count.

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <thread>
#include <vector>

namespace carleman {

inline unsigned worker_count() {
  if (const char* env = std::getenv("CARLEMAN_LAB_THREADS")) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end != env && n >= 1) return static_cast<unsigned>(n);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? hw : 1;
}

// fn(i) for i in [begin, end); fn must only touch state owned by index i.
template <typename Fn>
void parallel_for(std::size_t begin, std::size_t end, Fn&& fn) {
  const std::size_t n = end > begin ? end - begin : 0;
  const unsigned workers =
      static_cast<unsigned>(std::min<std::size_t>(worker_count(), n ? n : 1));
  if (n == 0) return;
  if (workers <= 1 || n < 256) {
    for (std::size_t i = begin; i < end; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  const std::size_t chunk = (n + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    const std::size_t lo = begin + w * chunk;
    if (lo >= end) break;
    const std::size_t hi = std::min(end, lo + chunk);
    pool.emplace_back([lo, hi, &fn] {
      for (std::size_t i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace carleman
