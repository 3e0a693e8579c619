// Copyright (c) 2026 the papt authors. Apache-2.0 license; see LICENSE.
#pragma once

#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace papt {

/// Worker-pool degree: explicit argument, else PAPT_THREADS, else hardware.
inline unsigned default_threads() {
  if (const char* env = std::getenv("PAPT_THREADS")) {
    int t = std::atoi(env);
    if (t >= 1) return static_cast<unsigned>(t);
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw ? hw : 1;
}

/// Run fn(i) for i in [0, count) on a bounded pool. Work is claimed from a
/// shared counter; callers must write results into per-index slots so the
/// outcome is independent of the schedule.
inline void parallel_for_index(std::uint64_t count, unsigned threads,
                               const std::function<void(std::uint64_t)>& fn) {
  if (threads <= 1 || count <= 1) {
    for (std::uint64_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::uint64_t> next{0};
  std::vector<std::thread> pool;
  auto worker = [&] {
    for (;;) {
      std::uint64_t i = next.fetch_add(1);
      if (i >= count) return;
      fn(i);
    }
  };
  unsigned nthreads = static_cast<unsigned>(std::min<std::uint64_t>(threads, count));
  pool.reserve(nthreads);
  for (unsigned t = 0; t < nthreads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
}

}  // namespace papt
