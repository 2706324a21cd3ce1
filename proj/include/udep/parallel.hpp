#ifndef UDEP_PARALLEL_HPP
#define UDEP_PARALLEL_HPP

#include <atomic>
#include <exception>
#include <thread>
#include <vector>

namespace udep {

// Runs f(i) for i in [0, n). threads <= 1 runs inline; otherwise work is
// pulled from a shared counter. Results must be written to pre-sized,
// index-addressed storage so that output order never depends on scheduling.
template <typename F>
void parallel_for(int n, int threads, F&& f) {
  if (threads <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<int> next(0);
  std::exception_ptr error;
  std::atomic<bool> failed(false);
  auto worker = [&]() {
    while (true) {
      int i = next.fetch_add(1);
      if (i >= n || failed.load()) return;
      try {
        f(i);
      } catch (...) {
        if (!failed.exchange(true)) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  int count = std::min(threads, n);
  pool.reserve(count);
  for (int t = 0; t < count; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace udep

#endif  // UDEP_PARALLEL_HPP
