#pragma once

// Thin helpers over OpenMP so call sites stay readable.

#include <omp.h>

namespace ugs::parallel {

inline int max_threads() { return omp_get_max_threads(); }

inline void set_threads(int n) {
  if (n > 0) omp_set_num_threads(n);
}

inline int thread_id() { return omp_get_thread_num(); }

}  // namespace ugs::parallel
