#pragma once

#include <Eigen/Dense>

#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace elsis {

inline int resolve_threads(int threads) {
  if (threads > 0) return threads;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// Static block partition of [begin, end); fn must handle its own per-item
// error capture if items may throw.  Results must be written to disjoint
// slots so the outcome is independent of scheduling.
inline void parallel_for(Eigen::Index begin, Eigen::Index end, int threads,
                         const std::function<void(Eigen::Index)>& fn) {
  const Eigen::Index count = end - begin;
  threads = resolve_threads(threads);
  if (threads <= 1 || count <= 1) {
    for (Eigen::Index i = begin; i < end; ++i) fn(i);
    return;
  }
  const int workers = static_cast<int>(std::min<Eigen::Index>(threads, count));
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::exception_ptr first_error;
  std::mutex error_mutex;
  for (int t = 0; t < workers; ++t) {
    const Eigen::Index lo = begin + count * t / workers;
    const Eigen::Index hi = begin + count * (t + 1) / workers;
    pool.emplace_back([&, lo, hi] {
      try {
        for (Eigen::Index i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace elsis
