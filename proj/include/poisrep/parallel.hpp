#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace poisrep {

namespace detail {
inline std::atomic<unsigned>& thread_limit() {
  static std::atomic<unsigned> limit{0};
  return limit;
}
}  // namespace detail

/// Caps worker threads for all parallel loops; 0 means hardware concurrency.
inline void set_thread_limit(unsigned n) { detail::thread_limit() = n; }

inline unsigned worker_count() {
  unsigned lim = detail::thread_limit();
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  return lim == 0 ? hw : lim;
}

/// Runs f(i) for i in [0, n) on up to worker_count() threads, in contiguous
/// chunks. The first exception thrown by any task is rethrown.
template <typename F>
void parallel_for(std::size_t n, F&& f, std::size_t min_chunk = 64) {
  const std::size_t workers = std::min<std::size_t>(worker_count(), (n + min_chunk - 1) / std::max<std::size_t>(min_chunk, 1));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::exception_ptr error;
  std::mutex mu;
  std::vector<std::thread> pool;
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t lo = w * chunk;
    const std::size_t hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&, lo, hi] {
      try {
        for (std::size_t i = lo; i < hi; ++i) f(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace poisrep
