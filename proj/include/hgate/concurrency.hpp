#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace hgate {

/// Worker count: hardware concurrency, capped by HOMOCLINIC_GATE_THREADS.
inline int thread_cap() {
  int hw = int(std::thread::hardware_concurrency());
  if (hw <= 0) hw = 1;
  if (const char* env = std::getenv("HOMOCLINIC_GATE_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return std::min(v, 4 * hw);
  }
  return hw;
}

/// Index-parallel loop; fn(i) must not throw and results must be written by
/// index so the output is deterministic regardless of schedule.
inline void parallel_for(std::size_t n,
                         const std::function<void(std::size_t)>& fn) {
  const std::size_t nt = std::min<std::size_t>(std::size_t(thread_cap()), n);
  if (nt <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(nt);
  for (std::size_t k = 0; k < nt; ++k)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) fn(i);
    });
  for (auto& th : pool) th.join();
}

}  // namespace hgate
