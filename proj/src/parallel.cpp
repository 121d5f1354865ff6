#include "hgap/parallel.hpp"

#include <cstdlib>
#include <string>

namespace hgap {

int resolve_threads(const Execution& ex) {
  if (ex.serial) return 1;
  if (ex.threads > 0) return ex.threads;
  if (const char* env = std::getenv("HGAP_THREADS")) {
    try {
      const int t = std::stoi(env);
      if (t > 0) return t;
    } catch (const std::exception&) {
      // fall through to the default
    }
  }
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace hgap
