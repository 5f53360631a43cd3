#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <utility>
#include <vector>

namespace pcrast {

inline unsigned resolve_workers(unsigned requested) {
  if (requested != 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw != 0 ? hw : 1;
}

// Runs fn(begin, end) over contiguous chunks of [0, n). With a single worker
// the call happens inline on the calling thread.
template <typename Fn>
void parallel_chunks(std::size_t n, unsigned workers, Fn&& fn) {
  const std::size_t parts = std::min<std::size_t>(resolve_workers(workers), n);
  if (n == 0) return;
  if (parts <= 1) {
    fn(std::size_t{0}, n);
    return;
  }
  const std::size_t chunk = (n + parts - 1) / parts;
  std::vector<std::thread> pool;
  pool.reserve(parts);
  std::mutex err_mutex;
  std::exception_ptr err;
  for (std::size_t t = 0; t < parts; ++t) {
    const std::size_t begin = t * chunk;
    const std::size_t end = std::min(n, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&, begin, end] {
      try {
        fn(begin, end);
      } catch (...) {
        const std::lock_guard<std::mutex> lock(err_mutex);
        if (!err) err = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

}  // namespace pcrast
