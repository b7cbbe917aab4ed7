#pragma once

#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace rmdur {

// strided index partition; workers write to preallocated slots so results do
// not depend on scheduling.  the first exception is rethrown after join.
template <class F>
void parallel_for(int nitems, int nthreads, F&& f) {
  if (nthreads < 1) nthreads = 1;
  if (nthreads == 1 || nitems <= 1) {
    for (int i = 0; i < nitems; ++i) f(i);
    return;
  }
  if (nthreads > nitems) nthreads = nitems;
  std::mutex mu;
  std::exception_ptr first;
  std::vector<std::thread> pool;
  pool.reserve(nthreads);
  for (int w = 0; w < nthreads; ++w)
    pool.emplace_back([&, w] {
      try {
        for (int i = w; i < nitems; i += nthreads) f(i);
      } catch (...) {
        std::lock_guard<std::mutex> lk(mu);
        if (!first) first = std::current_exception();
      }
    });
  for (auto& t : pool) t.join();
  if (first) std::rethrow_exception(first);
}

}  // namespace rmdur
