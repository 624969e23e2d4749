#pragma once

// Deterministic data parallelism: work items are pure and write only to
// their own pre-assigned slot, so results never depend on scheduling or on
// the worker count. COALITION_ATTRIB_THREADS caps the pool (0 or unset =
// hardware concurrency).

#include <cstddef>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace coalition {

inline unsigned worker_cap() {
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  const char* env = std::getenv("COALITION_ATTRIB_THREADS");
  if (env == nullptr || *env == '\0') return hw;
  const long parsed = std::strtol(env, nullptr, 10);
  if (parsed <= 0) return hw;  // 0 = auto; garbage falls back to auto
  return static_cast<unsigned>(parsed);
}

template <typename Fn>
void parallel_for(std::size_t count, Fn&& fn) {
  const std::size_t workers = std::min<std::size_t>(worker_cap(), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = count * w / workers;
    const std::size_t end = count * (w + 1) / workers;
    pool.emplace_back([&fn, begin, end] {
      for (std::size_t i = begin; i < end; ++i) fn(i);
    });
  }
  for (auto& worker : pool) worker.join();
}

}  // namespace coalition
