#include "pathgauge/parallel.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace pathgauge {

namespace {
#ifdef _OPENMP
const int kDefaultThreads = omp_get_max_threads();
#endif
}  // namespace

void set_max_threads(int threads) {
#ifdef _OPENMP
  omp_set_num_threads(threads < 1 ? kDefaultThreads : threads);
#else
  (void)threads;
#endif
}

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace pathgauge
