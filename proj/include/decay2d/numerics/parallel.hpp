#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace decay2d::numerics {

/// Worker count: hardware concurrency, capped by DECAY2D_THREADS when set.
inline std::size_t worker_count() {
  std::size_t hw = std::max<std::size_t>(1, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("DECAY2D_THREADS")) {
    try {
      long cap = std::stol(env);
      if (cap >= 1) hw = std::min<std::size_t>(hw, static_cast<std::size_t>(cap));
    } catch (...) {
      // ignore malformed values
    }
  }
  return hw;
}

/// Runs fn(k) for k in [begin, end), split into contiguous chunks.
/// Each index is visited exactly once; callers must write disjoint outputs.
template <class Fn>
void parallel_for(std::size_t begin, std::size_t end, Fn&& fn) {
  if (end <= begin) return;
  const std::size_t count = end - begin;
  const std::size_t workers = std::min(worker_count(), (count + 63) / 64);
  if (workers <= 1) {
    for (std::size_t k = begin; k < end; ++k) fn(k);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  const std::size_t chunk = (count + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t lo = begin + w * chunk;
    const std::size_t hi = std::min(end, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&, w, lo, hi] {
      try {
        for (std::size_t k = lo; k < hi; ++k) fn(k);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

} // namespace decay2d::numerics
