#include "actv/exec.hpp"

#ifdef ACTV_HAVE_OPENMP
#include <omp.h>
#endif

namespace actv {

int max_threads() {
#ifdef ACTV_HAVE_OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

bool openmp_enabled() {
#ifdef ACTV_HAVE_OPENMP
  return true;
#else
  return false;
#endif
}

}  // namespace actv
