#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "swe/types.hpp"

namespace swe {

/// Runs body(i) for i in [0, count) on up to `threads` workers. Each index is
/// handled exactly once; results written by index do not depend on the
/// schedule. The exception thrown for the smallest failing index is rethrown.
template <typename Body>
void parallel_for(Index count, int threads, Body&& body) {
  if (count <= 0) return;
  const Index workers = std::clamp<Index>(threads, 1, count);
  if (workers == 1) {
    for (Index i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<Index> next{0};
  std::mutex guard;
  Index failed_at = count;
  std::exception_ptr failure;
  auto run = [&] {
    for (Index i = next++; i < count; i = next++) {
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(guard);
        if (i < failed_at) {
          failed_at = i;
          failure = std::current_exception();
        }
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers - 1));
  for (Index w = 1; w < workers; ++w) pool.emplace_back(run);
  run();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace swe
