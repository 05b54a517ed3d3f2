#pragma once

namespace pathgauge {

// Upper bound on worker threads used by the parallel kernels. Values < 1
// restore the runtime default. No-op without OpenMP.
void set_max_threads(int threads);
int max_threads();

}  // namespace pathgauge
