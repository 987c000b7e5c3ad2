#pragma once

#include "cavmem/model.hpp"
#include "cavmem/shapes.hpp"

#include <complex>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

namespace cavmem {

struct ConvergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class SegmentKind { ScaledShape, ExpDecay };

struct Segment {
    double t_start;
    double t_end;
    SegmentKind kind;
    // ScaledShape: psi(t) = scale * phi(t).
    // ExpDecay:    psi(t) = scale * exp(-rate (t - t_start)).
    std::complex<double> scale;
};

// Piecewise target mode function psi(t) for retrieval: scaled copies of the
// pulse shape joined by exponential decays at the maximal retrieval rate.
struct RetrievalMap {
    std::vector<Segment> segments;
    std::vector<double> critical_times;
    double c = 1.0;
    double rate = 1.0;  // Gamma in the atom-limited regime, kappa otherwise
    PulseShape shape;
    bool degenerate_fast = false;  // t_c = t1, pure exponential readout
    bool two_tc_fallback = false;  // two-t_c construction fell back to one

    std::complex<double> psi(double t) const;
    std::complex<double> psi_dot(double t) const;
    // Integral of |psi|^2 from the start of the map up to t (closed form
    // per segment).
    double cum_intensity(double t) const;
    double total_intensity() const;
    double t_begin() const { return segments.front().t_start; }
    double t_end() const { return segments.back().t_end; }
};

// Earliest time where |psi|^2 = c^2 |phi|^2 saturates the maximal retrieval
// rate 2*rate*(1 - integral of |psi|^2). Returns t1 when already violated
// there, nullopt when the constraint holds on the whole interval.
std::optional<double> find_critical_time(const PulseShape& shape, double rate,
                                         double c);

struct PipelineResult {
    double c = 1.0;
    double eta = 1.0;
    RetrievalMap map;
    int iterations = 0;
};

// Efficiency of the single-t_c ansatz at a given scale c (used by the
// fixed-point loop and by stationarity checks).
double eta_at_c(const PulseShape& shape, double rate, double c);
RetrievalMap map_at_c(const PulseShape& shape, double rate, double c);

// Fixed point of c = 1/sqrt(eta(c)) for the single-t_c ansatz.
PipelineResult optimize_c(const PulseShape& shape, double rate);

// Squared overlap of psi with the target shape, |integral phi* psi|^2.
double overlap_eta(const RetrievalMap& map);

// Three-segment map with a second critical time chosen so the total mapped
// intensity is exactly one; falls back to the single-t_c map (flagged) when
// no second saturation point exists.
PipelineResult two_tc_map(const PulseShape& shape, double rate);

// Comparison strategy of earlier work: largest c <= 1 such that psi = c*phi
// satisfies the rate constraint everywhere; eta = c^2.
struct CLeqOneResult {
    double c;
    double eta;
};
CLeqOneResult c_leq_one_eta(const PulseShape& shape, double rate);

enum class PostTcMode { Zero, Decouple };

struct Impulse {
    double t;
    double area;   // rotation angle in [0, pi/2]
    double phase;  // drive phase nu
};

// Sampled control field plus impulsive-rotation events. `fn` evaluates the
// underlying analytic drive when available (preferred by the simulator);
// the samples are the export/plotting view of the same drive.
struct ControlDrive {
    std::vector<double> t;
    std::vector<std::complex<double>> omega;
    std::vector<double> theta;
    std::vector<Impulse> impulses;
    PostTcMode post_tc_mode = PostTcMode::Zero;
    std::vector<double> critical_times;
    double t1 = 0.0, t2 = 0.0;
    double decouple_omega = 0.0;  // drive magnitude after t_c in Decouple mode
    // Ideal decoupling interval [a,b] (empty when a >= b).
    double decouple_from = 1.0, decouple_to = 0.0;
    std::function<std::complex<double>(double)> fn;
    std::function<std::complex<double>(double)> fn_dot;

    std::complex<double> at(double time) const;
};

// Control field for the atom-limited regime (rate = Gamma), Eq.-(18)-style
// inversion of the reduced equations of motion plus the phase of S.
ControlDrive synthesize_omega_atom(const RetrievalMap& map, double delta,
                                   double Gamma);

// Cavity-limited regime (rate = kappa). After t_c the drive is ramped far
// above g*sqrt(N) to decouple the atoms; `decouple_mult` is that magnitude
// in units of g*sqrt(N).
ControlDrive synthesize_omega_cavity(const RetrievalMap& map,
                                     const MemoryParams& params,
                                     double decouple_mult = 100.0);

// Adiabatic-regime drive, valid for Gamma*tau >> 1.
ControlDrive adiabatic_omega(const PulseShape& shape, double Gamma,
                             double delta);

}  // namespace cavmem
