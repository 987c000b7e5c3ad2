#pragma once

#include "cavmem/control.hpp"
#include "cavmem/dynamics.hpp"
#include "cavmem/model.hpp"
#include "cavmem/shapes.hpp"

#include <complex>
#include <cstdint>
#include <vector>

namespace cavmem {

enum class GridInterp { Cubic, Linear };
enum class GridSpacing { Uniform, DenseAtEnd };

// Gridded control field for direct numerical optimization.
struct ControlGrid {
    std::vector<double> knots;
    std::vector<std::complex<double>> values;
    GridInterp interpolation = GridInterp::Cubic;
    GridSpacing spacing = GridSpacing::Uniform;

    // DenseAtEnd clusters the knots geometrically (interval ratio 0.9)
    // toward t2, where storage needs its sharpest features.
    static ControlGrid make(double t1, double t2, int n,
                            GridSpacing spacing = GridSpacing::Uniform,
                            GridInterp interp = GridInterp::Cubic);

    ControlDrive to_drive() const;
};

struct OctOptions {
    ModelTier tier = ModelTier::AtomLimitedLossless;
    bool real_only = true;   // optimize Re(Omega) only (Delta = 0 benchmarks)
    int max_iter = 500;
    double grad_tol = 1e-8;
    int restarts = 3;        // random restarts tried after the zero start
    std::uint64_t seed = 20240917;
    double fd_step = 1e-6;   // relative central-difference step
    int sim_steps = 4000;    // RK4 substeps for the storage objective
    int jobs = 0;            // workers for the gradient components
};

struct OctResult {
    ControlGrid grid;
    double eta = 0.0;
    int iterations = 0;
    bool converged = false;
};

// Maximize the storage efficiency |S(t2)|^2 for the mirrored input of
// `shape` over the knot values of `grid`. Quasi-Newton (L-BFGS) iterations
// with central-finite-difference gradients; deterministic for fixed seeds.
OctResult oct_optimize(const PulseShape& shape, const MemoryParams& params,
                       ControlGrid grid, const ControlDrive* seed_drive,
                       const OctOptions& opt = {});

// Storage efficiency of the grid's current values through the same
// fixed-grid propagator the optimizer uses.
double oct_storage_eta(const PulseShape& shape, const MemoryParams& params,
                       const ControlGrid& grid, const OctOptions& opt = {});

}  // namespace cavmem
