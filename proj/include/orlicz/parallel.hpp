#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace orlicz {

/// Worker cap: OF_THREADS when set to a positive integer, otherwise the
/// hardware concurrency.
inline unsigned thread_cap() {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("OF_THREADS")) {
    try {
      const int v = std::stoi(env);
      if (v > 0) return static_cast<unsigned>(v);
    } catch (...) {
    }
  }
  return hw;
}

/// Runs task(k) for k in [0, count) on up to thread_cap() threads. Tasks must
/// write only to their own slot; the caller reduces slots in index order, so
/// results do not depend on the thread count.
template <class Task>
void parallel_tasks(std::size_t count, Task&& task) {
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(thread_cap(), count));
  if (workers <= 1) {
    for (std::size_t k = 0; k < count; ++k) task(k);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t k = next++; k < count; k = next++) task(k);
    });
  for (auto& t : pool) t.join();
}

}  // namespace orlicz
