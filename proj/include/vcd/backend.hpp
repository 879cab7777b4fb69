#pragma once

namespace vcd {

// Selects the kernel implementation. kSerial is the reference path the
// OpenMP kernels are tested against; both produce bit-identical results.
enum class Backend {
  kSerial,
  kOpenMP,
};

// Caps the OpenMP team size for subsequent parallel kernels (0 = runtime default).
void set_thread_count(int threads);
int max_threads();

}  // namespace vcd
