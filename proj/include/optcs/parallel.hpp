#pragma once

#include <cstddef>
#include <exception>

#include <omp.h>

namespace optcs {

// Worker count for data-parallel loops. threads <= 1 runs the plain serial
// loop; results are identical either way because every iteration writes
// only its own output slot.
struct Exec {
  int threads = 1;

  static Exec serial() { return {1}; }
  static Exec all_cores() { return {omp_get_max_threads()}; }
};

// Runs body(i) for i in [0, n). If iterations throw, the exception from the
// lowest index is rethrown after the loop, independent of scheduling.
template <class Body>
void parallel_for(std::size_t n, Exec exec, Body&& body) {
  if (exec.threads <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::exception_ptr error;
  std::size_t error_index = n;
  const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic) num_threads(exec.threads)
  for (long long i = 0; i < count; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
#pragma omp critical(optcs_parallel_for_error)
      {
        if (static_cast<std::size_t>(i) < error_index) {
          error_index = static_cast<std::size_t>(i);
          error = std::current_exception();
        }
      }
    }
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace optcs
