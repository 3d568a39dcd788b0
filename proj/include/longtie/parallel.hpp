#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace longtie {

/// Number of workers to use when the caller passes 0.
inline unsigned default_threads() { return std::max(1u, std::thread::hardware_concurrency()); }

/// Runs `body(worker, begin, end)` over [0, n) split into chunks that workers
/// claim dynamically. `body` must write only to per-index or per-worker state,
/// so results do not depend on scheduling.
template <class Body>
void parallel_for(std::size_t n, unsigned threads, Body&& body, std::size_t chunk = 1024) {
  if (threads == 0) threads = default_threads();
  if (threads == 1 || n <= chunk) {
    if (n > 0) body(0u, std::size_t{0}, n);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  auto worker = [&](unsigned w) {
    try {
      for (;;) {
        std::size_t b = next.fetch_add(chunk);
        if (b >= n) break;
        body(w, b, std::min(n, b + chunk));
      }
    } catch (...) {
      std::lock_guard lock(error_mu);
      if (!error) error = std::current_exception();
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned w = 0; w < threads; ++w) pool.emplace_back(worker, w);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace longtie
