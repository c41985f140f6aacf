#include "potlab/parallel.hpp"

#include <omp.h>

#include <atomic>

namespace potlab {

namespace {
std::atomic<int> cap{0};
}

void set_thread_cap(int n) { cap.store(n > 0 ? n : 0); }

int thread_count() {
  const int max = omp_get_max_threads();
  const int c = cap.load();
  return c > 0 && c < max ? c : max;
}

}  // namespace potlab
