#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace tubal {

namespace detail {
inline std::atomic<std::size_t>& thread_override() {
  static std::atomic<std::size_t> value{0};
  return value;
}
}  // namespace detail

/// Caps worker threads for per-slice work. 0 restores the default, which
/// reads TUBAL_THREADS (0 or unset = hardware concurrency).
inline void set_worker_threads(std::size_t n) { detail::thread_override() = n; }

inline std::size_t worker_threads() {
  if (const std::size_t forced = detail::thread_override().load(); forced > 0) return forced;
  if (const char* env = std::getenv("TUBAL_THREADS"); env != nullptr && *env != '\0') {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return v;
  }
  return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

/**
 * Runs body(i) for i in [0, count). Work is split into contiguous static
 * chunks, so each index is always processed by exactly one call and the
 * results never depend on the thread count. The first exception thrown by
 * any worker is rethrown on the calling thread.
 */
template <class Body>
void parallel_for(std::size_t count, Body&& body, std::size_t min_parallel = 2) {
  const std::size_t threads = std::min(worker_threads(), count);
  if (threads <= 1 || count < min_parallel) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) {
      const std::size_t begin = count * t / threads;
      const std::size_t end = count * (t + 1) / threads;
      pool.emplace_back([&, begin, end] {
        try {
          for (std::size_t i = begin; i < end; ++i) body(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace tubal
