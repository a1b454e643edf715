#pragma once

#include <cstddef>
#include <thread>
#include <vector>

namespace anslab {

inline unsigned default_thread_count() {
  unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : n;
}

/// Runs fn(thread_index, begin, end) over [0, total) split into contiguous
/// chunks, one per worker. Reductions must be accumulated per thread_index
/// and merged by the caller so results stay order-independent.
template <typename Fn>
void parallel_chunks(std::size_t total, unsigned threads, Fn&& fn) {
  if (threads <= 1 || total < 2) {
    fn(0u, std::size_t{0}, total);
    return;
  }
  if (threads > total) threads = static_cast<unsigned>(total);
  std::vector<std::thread> pool;
  pool.reserve(threads);
  const std::size_t chunk = (total + threads - 1) / threads;
  for (unsigned t = 0; t < threads; ++t) {
    const std::size_t lo = static_cast<std::size_t>(t) * chunk;
    const std::size_t hi = std::min(total, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&fn, t, lo, hi] { fn(t, lo, hi); });
  }
  for (auto& th : pool) th.join();
}

}  // namespace anslab
