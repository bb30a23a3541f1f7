#ifndef RANDHORIZON_PARALLEL_HPP
#define RANDHORIZON_PARALLEL_HPP

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace randhorizon {

// Worker count: hardware concurrency capped by RANDHORIZON_THREADS.
inline int thread_count() {
  int n = static_cast<int>(std::thread::hardware_concurrency());
  if (n <= 0) n = 1;
  if (const char* env = std::getenv("RANDHORIZON_THREADS")) {
    int cap = std::atoi(env);
    if (cap >= 1) n = std::min(n, cap);
  }
  return n;
}

// Chunked parallel loop over [0, count). body(i) must be independent per i;
// results are deterministic regardless of the thread count.
inline void parallel_for(int count, const std::function<void(int)>& body) {
  int workers = std::min(thread_count(), count);
  if (workers <= 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (int i = w; i < count; i += workers) body(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace randhorizon

#endif
