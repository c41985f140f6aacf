#pragma once

#include <exception>

namespace potlab {

/// Grid kernels come in two flavours with identical results: a plain loop
/// (the reference) and an OpenMP loop over nodes.
enum class Execution { serial, parallel };

/// Upper bound on OpenMP worker threads; 0 restores the runtime default.
/// Results never depend on the value.
void set_thread_cap(int n);
int thread_count();

/// Runs body(i) for i in [0, n). Each index must write only its own output.
/// An exception thrown by any iteration is rethrown once the loop is done.
template <class Body>
void for_each_index(long n, Execution exec, Body&& body) {
  if (exec == Execution::serial) {
    for (long i = 0; i < n; ++i) body(i);
    return;
  }
  std::exception_ptr err;
#pragma omp parallel for schedule(dynamic, 16) num_threads(thread_count())
  for (long i = 0; i < n; ++i) {
    try {
      body(i);
    } catch (...) {
#pragma omp critical(potlab_for_each_index)
      if (!err) err = std::current_exception();
    }
  }
  if (err) std::rethrow_exception(err);
}

}  // namespace potlab
