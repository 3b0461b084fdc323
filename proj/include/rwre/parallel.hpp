// Data-parallel replica loop with a static partition. Workers write only to
// per-replica slots; callers fold results in replica order afterwards, so
// numeric output is independent of the thread count.
#pragma once

#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace rwre {

inline int resolve_thread_count(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

template <class Fn>
void parallel_replicas(std::int64_t count, int threads, Fn&& fn) {
  threads = resolve_thread_count(threads);
  if (threads == 1 || count <= 1) {
    for (std::int64_t r = 0; r < count; ++r) fn(r);
    return;
  }
  const std::int64_t workers = std::min<std::int64_t>(threads, count);
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  std::exception_ptr error;
  std::mutex error_mu;
  for (std::int64_t w = 0; w < workers; ++w) {
    const std::int64_t lo = count * w / workers;
    const std::int64_t hi = count * (w + 1) / workers;
    pool.emplace_back([&, lo, hi] {
      try {
        for (std::int64_t r = lo; r < hi; ++r) fn(r);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace rwre
