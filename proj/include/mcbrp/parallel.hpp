#ifndef MCBRP_PARALLEL_HPP_
#define MCBRP_PARALLEL_HPP_

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace mcbrp {

// Splits [0, count) into contiguous chunks and runs fn(begin, end) on up to
// `workers` threads. Chunks are disjoint, so writes indexed by position are
// deterministic. The first exception thrown by any chunk is rethrown.
template <typename Fn>
void ParallelFor(std::size_t count, std::size_t workers, Fn&& fn) {
  if (count == 0) return;
  workers = std::clamp<std::size_t>(workers, 1, count);
  if (workers == 1) {
    fn(std::size_t{0}, count);
    return;
  }
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> threads;
    threads.reserve(workers);
    const std::size_t chunk = (count + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
      const std::size_t begin = w * chunk;
      const std::size_t end = std::min(count, begin + chunk);
      if (begin >= end) break;
      threads.emplace_back([&, begin, end] {
        try {
          fn(begin, end);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace mcbrp

#endif  // MCBRP_PARALLEL_HPP_
