#pragma once

#include <exception>
#include <mutex>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace lres {

/// Runs body(i) for i in [0, n), across OpenMP threads when `parallel` is
/// set.  The first exception thrown by any iteration is rethrown afterwards.
template <class Body>
void parallel_for(long n, bool parallel, Body&& body) {
  if (!parallel) {
    for (long i = 0; i < n; ++i) body(i);
    return;
  }
  std::exception_ptr first;
  std::mutex guard;
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < n; ++i) {
    try {
      body(i);
    } catch (...) {
      std::lock_guard<std::mutex> lock(guard);
      if (!first) first = std::current_exception();
    }
  }
  if (first) std::rethrow_exception(first);
}

}  // namespace lres
