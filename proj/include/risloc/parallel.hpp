#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace risloc {

/// Runs fn(i) for i in [0, count) split across threads in contiguous blocks.
/// Each index is visited exactly once and workers write only to their own
/// indices, so results are identical to a sequential loop.
template <typename Fn>
void parallel_for(std::size_t count, Fn&& fn, unsigned n_threads = 0) {
  if (n_threads == 0) n_threads = std::max(1u, std::thread::hardware_concurrency());
  if (n_threads <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  n_threads = static_cast<unsigned>(std::min<std::size_t>(n_threads, count));
  const std::size_t block = (count + n_threads - 1) / n_threads;
  std::vector<std::thread> workers;
  workers.reserve(n_threads);
  for (unsigned t = 0; t < n_threads; ++t) {
    const std::size_t lo = t * block;
    const std::size_t hi = std::min(count, lo + block);
    if (lo >= hi) break;
    workers.emplace_back([&fn, lo, hi] {
      for (std::size_t i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& w : workers) w.join();
}

}  // namespace risloc
