#pragma once

#include <cstddef>
#include <exception>
#include <mutex>
#include <vector>

#include <omp.h>

namespace wmn {

// Serial is the reference schedule; Parallel fans the same work out over
// OpenMP threads. Results must not depend on the choice.
enum class Execution { Serial, Parallel };

// Evaluates fn(i) for i in [0, count) and stores the results by index, so
// the output order never depends on thread scheduling. The first exception
// thrown by any worker is rethrown on the calling thread.
template <class R, class Fn>
std::vector<R> indexed_map(std::size_t count, Fn&& fn, Execution exec = Execution::Parallel) {
  std::vector<R> out(count);
  std::exception_ptr failure;
  std::mutex guard;
  const auto n = static_cast<long long>(count);
#pragma omp parallel for schedule(dynamic) if (exec == Execution::Parallel)
  for (long long i = 0; i < n; ++i) {
    try {
      out[static_cast<std::size_t>(i)] = fn(static_cast<std::size_t>(i));
    } catch (...) {
      std::lock_guard<std::mutex> lock(guard);
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

inline void set_thread_count(int threads) {
  if (threads > 0) omp_set_num_threads(threads);
}

}  // namespace wmn
