#include "dimlab/kernels.hpp"

#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace dimlab::kernels {

int default_workers() {
  static const int cached = [] {
    if (const char* env = std::getenv("DIMLAB_WORKERS")) {
      const int v = std::atoi(env);
      if (v >= 1) return v;
    }
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
  }();
  return cached;
}

int resolve_workers(int requested) {
  if (requested >= 1) return requested;
  return default_workers();
}

}  // namespace dimlab::kernels
