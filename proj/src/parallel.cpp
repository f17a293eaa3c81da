#include "qotl/parallel.hpp"

#include <algorithm>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace qotl::par {

namespace {
int g_max_threads = 0;  // 0: library default
}

int max_threads() {
#ifdef _OPENMP
  return g_max_threads > 0 ? g_max_threads : omp_get_max_threads();
#else
  return 1;
#endif
}

void set_max_threads(int n) {
  g_max_threads = std::max(0, n);
#ifdef _OPENMP
  if (g_max_threads > 0) omp_set_num_threads(g_max_threads);
#endif
}

}  // namespace qotl::par
