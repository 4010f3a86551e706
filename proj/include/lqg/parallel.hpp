#pragma once

#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace lqg {

// Worker count: explicit argument wins, then LQG_LAB_THREADS, then cores.
inline int resolve_threads(int requested = 0) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("LQG_LAB_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

// Order-independent parallel map over trial indices.  Each trial derives its
// own RNG stream from its index, so results are identical for any worker
// count; callers must write into per-trial slots and reduce in index order.
template <class F>
void parallel_for(std::size_t n, int threads, F&& body) {
  threads = resolve_threads(threads);
  if (threads <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      body(i);
    }
  };
  std::vector<std::thread> pool;
  const int nw = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(threads), n));
  pool.reserve(static_cast<std::size_t>(nw));
  for (int t = 0; t < nw; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
}

}  // namespace lqg
