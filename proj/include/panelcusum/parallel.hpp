#ifndef PANELCUSUM_PARALLEL_HPP_
#define PANELCUSUM_PARALLEL_HPP_

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace panelcusum {

// Runs fn(i) for i in [0, count) on up to `workers` threads. Work items are
// handed out one at a time; callers write results into slot i so the output
// never depends on scheduling. The first exception thrown by any task is
// rethrown on the calling thread.
template <typename Fn>
void parallel_for(std::size_t count, unsigned workers, Fn &&fn) {
  const std::size_t pool =
      std::min<std::size_t>(std::max(1u, workers), count);
  if (pool <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(count);
        return;
      }
    }
  };
  {
    std::vector<std::jthread> threads;
    threads.reserve(pool - 1);
    for (std::size_t w = 1; w < pool; ++w) threads.emplace_back(work);
    work();
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace panelcusum

#endif  // PANELCUSUM_PARALLEL_HPP_
