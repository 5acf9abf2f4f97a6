#pragma once

#include <algorithm>
#include <cstdlib>
#include <thread>
#include <vector>

namespace billiard {

// Worker count: hardware concurrency capped by the BILLIARD_THREADS
// environment variable (values < 1 are treated as 1).
inline unsigned thread_count() {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("BILLIARD_THREADS")) {
    long v = std::strtol(env, nullptr, 10);
    if (v >= 1) hw = std::min(hw, static_cast<unsigned>(v));
  }
  return hw;
}

// Runs f(chunk_index, begin, end) over [0, n) split into contiguous chunks,
// one per worker. Results must be merged by the caller in chunk order so that
// the outcome is independent of scheduling.
template <typename F>
void parallel_chunks(size_t n, F&& f) {
  unsigned workers = thread_count();
  size_t chunks = std::min<size_t>(workers, n);
  if (chunks <= 1) {
    if (n > 0) f(size_t{0}, size_t{0}, n);
    return;
  }
  std::vector<std::thread> pool;
  size_t per = (n + chunks - 1) / chunks;
  for (size_t c = 0; c < chunks; ++c) {
    size_t begin = c * per;
    size_t end = std::min(n, begin + per);
    if (begin >= end) break;
    pool.emplace_back([&f, c, begin, end] { f(c, begin, end); });
  }
  for (auto& t : pool) t.join();
}

}  // namespace billiard
