#pragma once

// Path-ensemble loop. Each path writes only its own slot in a caller-owned
// output array, so results are identical for any worker count; reductions
// happen afterwards, serially, in path-index order.

#include <cstdint>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace hgap {

struct Execution {
  /// Worker count; 0 means HGAP_THREADS if set, else the OpenMP default.
  int threads = 0;
  /// Run the plain serial loop (reference implementation).
  bool serial = false;
};

/// Resolved worker count for an execution request.
int resolve_threads(const Execution& ex);

template <class Body>
void for_each_path(std::int64_t count, const Execution& ex, Body&& body) {
  if (ex.serial) {
    for (std::int64_t i = 0; i < count; ++i) body(i);
    return;
  }
#ifdef _OPENMP
  const int threads = resolve_threads(ex);
#pragma omp parallel for schedule(dynamic, 64) num_threads(threads)
  for (std::int64_t i = 0; i < count; ++i) body(i);
#else
  for (std::int64_t i = 0; i < count; ++i) body(i);
#endif
}

}  // namespace hgap
