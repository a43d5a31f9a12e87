#pragma once

#include <cstddef>
#include <exception>
#include <vector>

namespace sggmech {

// Worker thread count: SGG_MECH_THREADS when set to a positive integer,
// otherwise the OpenMP default. 0 or unset means auto.
int worker_threads();

// Runs fn(i) for i in [0, n) across worker threads. The exception of the
// lowest failing index is rethrown after the loop.
template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  std::vector<std::exception_ptr> errors(n);
  const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static) num_threads(worker_threads())
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    try {
      fn(static_cast<std::size_t>(i));
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace sggmech
