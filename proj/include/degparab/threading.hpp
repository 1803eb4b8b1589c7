#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace degparab {

// Run fn(i) for i in [0, count) on up to `threads` workers. Work items are
// claimed atomically; callers keep results deterministic by writing into
// index i of a preallocated buffer. threads <= 1 runs inline.
inline void parallel_for(long count, int threads, const std::function<void(long)>& fn) {
  if (threads <= 1 || count <= 1) {
    for (long i = 0; i < count; ++i) fn(i);
    return;
  }
  const int nw = static_cast<int>(std::min<long>(threads, count));
  std::atomic<long> next{0};
  std::vector<std::thread> pool;
  pool.reserve(nw);
  std::exception_ptr err;
  std::atomic<bool> failed{false};
  std::mutex err_mutex;
  for (int w = 0; w < nw; ++w)
    pool.emplace_back([&] {
      while (true) {
        const long i = next.fetch_add(1);
        if (i >= count || failed.load()) return;
        try {
          fn(i);
        } catch (...) {
          std::scoped_lock lk(err_mutex);
          if (!failed.exchange(true)) err = std::current_exception();
          return;
        }
      }
    });
  for (auto& t : pool) t.join();
  if (failed.load()) std::rethrow_exception(err);
}

}  // namespace degparab
