/**
 * @file lfres/parallel.hpp
 * @copyright Apache License 2.0
 */
#ifndef LFRES_PARALLEL_HPP
#define LFRES_PARALLEL_HPP

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace lfres {

inline int resolve_threads(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? static_cast<int>(hw) : 1;
}

// Runs fn(begin, end) over [0, n) split into contiguous chunks, one worker
// per thread. fn must only touch state disjoint between chunks. The first
// exception thrown by a worker is rethrown on the calling thread.
inline void parallel_for(std::size_t n, int threads,
                         const std::function<void(std::size_t, std::size_t)>& fn) {
  threads = resolve_threads(threads);
  if (n == 0) return;
  const std::size_t workers =
      std::min<std::size_t>(static_cast<std::size_t>(threads), n);
  if (workers <= 1) {
    fn(0, n);
    return;
  }
  std::atomic<std::size_t> failed{0};
  std::exception_ptr error;
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  const std::size_t chunk = (n + workers - 1) / workers;
  auto run = [&](std::size_t w) {
    const std::size_t b = w * chunk;
    const std::size_t e = std::min(n, b + chunk);
    if (b >= e) return;
    try {
      fn(b, e);
    } catch (...) {
      if (failed.exchange(1) == 0) error = std::current_exception();
    }
  };
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(run, w);
  run(0);
  for (auto& t : pool) t.join();
  if (failed.load()) std::rethrow_exception(error);
}

}  // namespace lfres

#endif  // LFRES_PARALLEL_HPP
