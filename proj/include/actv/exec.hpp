#pragma once

namespace actv {

// Execution policy for the per-block kernels. `serial` is the reference path
// used by the tests; `parallel` distributes blocks over OpenMP threads and
// produces bit-identical results (no cross-block reductions).
enum class Exec { serial, parallel };

int max_threads();
bool openmp_enabled();

}  // namespace actv
