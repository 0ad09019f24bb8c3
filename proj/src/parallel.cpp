#include "sticky/parallel.hpp"

#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace sticky {

int thread_count() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

int configure_threads_from_env() {
    if (const char* env = std::getenv("STICKY_SPECTRA_THREADS")) {
        try {
            const int requested = std::stoi(env);
#ifdef _OPENMP
            if (requested > 0) omp_set_num_threads(requested);
#else
            (void)requested;
#endif
        } catch (const std::exception&) {
            // Non-numeric values leave the OpenMP default in place.
        }
    }
    return thread_count();
}

}  // namespace sticky
