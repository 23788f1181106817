#pragma once

#include <exception>
#include <functional>
#include <thread>
#include <vector>

#include "rccm/errors.hpp"

namespace rccm {

// Runs fn(i) for i in [0, n). With threads > 1 the index range is split into
// contiguous chunks, one worker per chunk; fn must only touch slot i of any
// shared output. Results are identical for every thread count.
inline void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
  if (n <= 0) return;
  if (threads < 1) throw InvalidInputError("parallel_for: threads must be >= 1");
  const int workers = std::min(threads, n);
  if (workers == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
  const int base = n / workers;
  const int extra = n % workers;
  int start = 0;
  for (int w = 0; w < workers; ++w) {
    const int count = base + (w < extra ? 1 : 0);
    const int lo = start;
    const int hi = start + count;
    start = hi;
    pool.emplace_back([&, w, lo, hi]() {
      try {
        for (int i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        errors[static_cast<std::size_t>(w)] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace rccm
