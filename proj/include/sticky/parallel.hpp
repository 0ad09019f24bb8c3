#pragma once

namespace sticky {

/// Selects between the serial reference kernels and their OpenMP versions.
enum class Execution { Serial, Parallel };

/// Number of threads the parallel kernels will use.
int thread_count();

/// Caps the OpenMP thread count from STICKY_SPECTRA_THREADS when it is set to a
/// positive integer. Returns the resulting thread count.
int configure_threads_from_env();

}  // namespace sticky
