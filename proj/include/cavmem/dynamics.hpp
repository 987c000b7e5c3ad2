#pragma once

#include "cavmem/control.hpp"
#include "cavmem/model.hpp"
#include "cavmem/shapes.hpp"

#include <complex>
#include <optional>
#include <vector>

namespace cavmem {

enum class ModelTier {
    Full,                  // cavity + polarization + spin wave
    AtomLimited,           // cavity eliminated, losses kept
    AtomLimitedLossless,   // cavity eliminated, gamma = kappa_loss = 0
    CavityLimited,         // polarization eliminated (needs gamma or delta != 0)
    CavityLimitedSpecial,  // polarization eliminated at gamma = delta = 0
};

std::string to_string(ModelTier tier);

// Time series of the complex amplitudes from one integration. E is absent
// in the atom-limited tiers, P in the cavity-limited ones (where |P|^2 is
// reconstructed from the adiabatic constraint into p2).
struct Trajectory {
    ModelTier tier = ModelTier::AtomLimitedLossless;
    std::vector<double> t;
    std::vector<std::complex<double>> E, P, S, E_out;
    std::vector<double> out_norm;      // cumulative integral of |E_out|^2
    std::vector<double> in_norm;       // cumulative integral of |E_in|^2
    std::vector<double> p2;            // cumulative integral of |P|^2
    std::vector<double> conservation;  // excitation-balance residual
    std::complex<double> target_overlap = 0.0;  // integral of phi* E_out
    bool has_target = false;
    PulseShape target_used;  // which target the overlap was accumulated for
    double S0_norm2 = 1.0;   // |S(t1)|^2 at the start of retrieval
};

struct SimOptions {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    // Retrieval target: accumulates integral phi* E_out as an extra state.
    const PulseShape* target = nullptr;
    // Replace the ideal post-t_c decoupling by a finite drive of this
    // magnitude (Full tier only; 0 keeps the drive's own setting).
    double finite_decouple_omega = -1.0;
};

Trajectory simulate_retrieval(const ControlDrive& drive,
                              const MemoryParams& params, ModelTier tier,
                              double t1, double t2,
                              std::complex<double> S_init,
                              const SimOptions& opt = {});

struct StorageResult {
    Trajectory traj;
    double eta_s;
};

// Storage of the mirror image of `target`: the injected field is
// E_in(t) = conj(target(t1+t2-t)), all atoms start in g.
StorageResult simulate_storage(const ControlDrive& drive,
                               const PulseShape& target,
                               const MemoryParams& params, ModelTier tier,
                               const SimOptions& opt = {});

// Omega'(t) = conj(Omega(t2-(t-t1))); impulses move to the mirrored times
// with conjugated phase.
ControlDrive time_reverse_drive(const ControlDrive& drive, double t1, double t2);

// eta_r = |integral phi* E_out|^2 / |S(t1)|^2. Uses the overlap accumulated
// during integration when the trajectory was run with this target;
// otherwise integrates the stored samples.
double overlap_efficiency(const Trajectory& traj, const PulseShape& target);

// P_gamma = 2 gamma integral |P|^2 dt.
double loss_probability(const Trajectory& traj, double gamma);

struct AdiabaticGap {
    double eta_reduced;
    double eta_full;
    double gap;
    double predicted_scale;  // 1/(kappa tau) or (1/Gamma tau)(1 + 1/kappa tau)
};

// Same drive through the reduced tier and the full model.
AdiabaticGap adiabatic_validity(const ControlDrive& drive,
                                const MemoryParams& params, ModelTier reduced,
                                const PulseShape& target,
                                const SimOptions& opt = {});

}  // namespace cavmem
