#pragma once

#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace echolab {

/// Worker cap: hardware concurrency clamped by the ECHOLAB_THREADS environment variable.
inline unsigned thread_budget() {
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  if (const char* env = std::getenv("ECHOLAB_THREADS")) {
    long requested = std::strtol(env, nullptr, 10);
    if (requested >= 1 && static_cast<unsigned>(requested) < hw) hw = static_cast<unsigned>(requested);
  }
  return hw;
}

/// Chunked parallel map over [0, n). Each index is written exactly once, so the
/// result is identical for any worker count.
template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  unsigned workers = thread_budget();
  if (workers <= 1 || n < 2048) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::size_t chunk = (n + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    std::size_t begin = static_cast<std::size_t>(w) * chunk;
    if (begin >= n) break;
    std::size_t end = std::min(n, begin + chunk);
    pool.emplace_back([begin, end, &fn] {
      for (std::size_t i = begin; i < end; ++i) fn(i);
    });
  }
  for (std::thread& t : pool) t.join();
}

}  // namespace echolab
