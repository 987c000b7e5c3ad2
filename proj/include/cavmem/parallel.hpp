#pragma once

#include <omp.h>

#include <cstdlib>
#include <cstddef>

namespace cavmem {

// Worker count resolution: explicit argument > CAVMEM_JOBS > OpenMP default.
inline int resolve_jobs(int jobs = 0) {
    if (jobs > 0) return jobs;
    if (const char* env = std::getenv("CAVMEM_JOBS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    return omp_get_max_threads();
}

// Serial reference loop. Kept as an explicit code path so the parallel
// variant can be checked against it.
template <class Body>
void serial_for(std::size_t n, Body&& body) {
    for (std::size_t i = 0; i < n; ++i) body(i);
}

// OpenMP loop over independent items; body(i) must only write state owned
// by item i. Results are therefore identical to serial_for regardless of
// the schedule.
template <class Body>
void parallel_for(std::size_t n, Body&& body, int jobs = 0) {
    const int nt = resolve_jobs(jobs);
    if (nt <= 1 || n <= 1) {
        serial_for(n, body);
        return;
    }
#pragma omp parallel for schedule(dynamic) num_threads(nt)
    for (long long i = 0; i < (long long)n; ++i) body((std::size_t)i);
}

}  // namespace cavmem
