#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace regint {

inline int& worker_override() {
  static int w = 0;
  return w;
}

/// Sets the count returned by default_workers(); 0 restores the environment default.
inline void set_default_workers(int w) { worker_override() = std::max(0, w); }

/// Worker count: the override if set, else REGINT_WORKERS, else the hardware concurrency.
inline int default_workers() {
  if (worker_override() > 0) return worker_override();
  if (const char* s = std::getenv("REGINT_WORKERS")) {
    const int w = std::atoi(s);
    if (w > 0) return w;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs fn(i) for i in [0, n). Each index is independent, so results never depend
/// on the worker count. The first exception thrown is rethrown after all workers stop.
template <typename Fn>
void parallel_for(long n, int workers, Fn&& fn) {
  if (n <= 0) return;
  workers = std::max(1, std::min<int>(workers, int(std::min<long>(n, 1L << 20))));
  if (workers == 1) {
    for (long i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<long> next{0};
  std::exception_ptr err;
  std::mutex m;
  auto body = [&] {
    while (true) {
      const long i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lk(m);
        if (!err) err = std::current_exception();
        next.store(n);
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 0; t < workers; ++t) pool.emplace_back(body);
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
}

}  // namespace regint
