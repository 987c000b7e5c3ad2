// Benchmark: serial reference loop against the OpenMP worker pool on a
// representative efficiency sweep.

#include "cavmem/control.hpp"
#include "cavmem/parallel.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <vector>

using namespace cavmem;

namespace {

double run_sweep(int n_points, int jobs, bool serial) {
    const auto shape = PulseShape::sech(1.0);
    std::vector<double> eta(n_points);
    auto body = [&](std::size_t i) {
        const double rate = 0.25 * std::pow(8.0, double(i) / (n_points - 1));
        eta[i] = optimize_c(shape, rate).eta;
    };
    const auto start = std::chrono::steady_clock::now();
    if (serial)
        serial_for(n_points, body);
    else
        parallel_for(n_points, body, jobs);
    const auto stop = std::chrono::steady_clock::now();
    double checksum = 0.0;
    for (double e : eta) checksum += e;
    std::printf("  checksum %.12f\n", checksum);
    return std::chrono::duration<double>(stop - start).count();
}

}  // namespace

int main(int argc, char** argv) {
    const int n = argc > 1 ? std::atoi(argv[1]) : 64;
    const int jobs = resolve_jobs();
    std::printf("sweep of %d points\n", n);
    std::printf("serial reference:\n");
    const double ts = run_sweep(n, 1, true);
    std::printf("  %.3f s\n", ts);
    std::printf("openmp (%d workers):\n", jobs);
    const double tp = run_sweep(n, jobs, false);
    std::printf("  %.3f s\n", tp);
    std::printf("speedup: %.2fx\n", ts / tp);
    return 0;
}
