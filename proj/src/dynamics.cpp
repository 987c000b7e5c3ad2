#include "cavmem/dynamics.hpp"

#include "cavmem/ode.hpp"
#include "cavmem/quadrature.hpp"
#include "cavmem/spline.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cavmem {

namespace {

using cd = std::complex<double>;
constexpr cd kI(0.0, 1.0);

// State layout per tier (trailing slots hold running integrals):
//   Full:                  E, P, S
//   AtomLimited(.Lossless): P, S
//   CavityLimited:          E, S
//   CavityLimitedSpecial:   E, S   (E integrated along the slaved value
//                                   -Omega S/(g sqrtN) so it can carry the
//                                   decoupled readout after t_c)
struct TierContext {
    ModelTier tier;
    MemoryParams params;
    DerivedRates rates;
    double q = 1.0;     // sqrt(C/(1+C)) sqrt(kappa_in/kappa)
    double feed = 0.0;  // (kappa_in - kappa_loss)/kappa
    cd dpol = 0.0;      // gamma + i delta
    int n_fields = 2;
    int i_out2, i_in2, i_p2, i_ovl;

    explicit TierContext(ModelTier t, const MemoryParams& p)
        : tier(t), params(p), rates(derived(p)) {
        n_fields = tier == ModelTier::Full ? 3 : 2;
        i_out2 = n_fields;
        i_in2 = n_fields + 1;
        i_p2 = n_fields + 2;
        i_ovl = n_fields + 3;
        const double pin = p.kappa_in / rates.kappa;
        q = rates.C_infinite ? std::sqrt(pin)
                             : std::sqrt(rates.C / (1.0 + rates.C) * pin);
        feed = (p.kappa_in - p.kappa_loss) / rates.kappa;
        dpol = cd(p.gamma, p.delta);
        if (tier == ModelTier::AtomLimitedLossless &&
            (p.gamma != 0.0 || p.kappa_loss != 0.0))
            throw std::invalid_argument(
                "AtomLimitedLossless tier requires gamma = kappa_loss = 0");
        if (tier == ModelTier::CavityLimited && dpol == 0.0)
            throw std::invalid_argument(
                "CavityLimited tier is singular at gamma = delta = 0; use "
                "CavityLimitedSpecial");
        if (tier == ModelTier::CavityLimitedSpecial &&
            (p.gamma != 0.0 || p.delta != 0.0))
            throw std::invalid_argument(
                "CavityLimitedSpecial tier requires gamma = delta = 0");
    }

    int state_size() const { return n_fields + 4; }
    bool has_cavity_field() const {
        return tier == ModelTier::Full || tier == ModelTier::CavityLimited ||
               tier == ModelTier::CavityLimitedSpecial;
    }

    cd e_out(const std::vector<cd>& y, cd e_in) const {
        switch (tier) {
            case ModelTier::Full:
            case ModelTier::CavityLimited:
            case ModelTier::CavityLimitedSpecial:
                return std::sqrt(2.0 * params.kappa_in) * y[0] - e_in;
            case ModelTier::AtomLimited:
                return feed * e_in +
                       kI * std::sqrt(2.0 * rates.Gamma_tilde) * q * y[0];
            case ModelTier::AtomLimitedLossless:
                return e_in + kI * std::sqrt(2.0 * rates.Gamma) * y[0];
        }
        return 0.0;
    }

    cd special_sdot(cd S, cd e_in, cd omega, cd omega_dot) const {
        const double gN = params.g_sqrtN;
        const double denom = gN * gN + std::norm(omega);
        return -(omega_dot * std::conj(omega) +
                 rates.kappa * std::norm(omega)) /
                   denom * S -
               std::sqrt(2.0 * params.kappa_in) * gN * std::conj(omega) /
                   denom * e_in;
    }

    double excitation_sum(const std::vector<cd>& y) const {
        double s = 0.0;
        for (int i = 0; i < n_fields; ++i) s += std::norm(y[i]);
        return s;
    }
};

struct DriveView {
    const ControlDrive* drive;
    double finite_decouple = -1.0;

    bool in_decouple(double t) const {
        return drive->post_tc_mode == PostTcMode::Decouple &&
               drive->decouple_from < drive->decouple_to &&
               t >= drive->decouple_from && t <= drive->decouple_to;
    }
    cd omega(double t) const {
        if (finite_decouple > 0.0 && in_decouple(t)) return finite_decouple;
        return drive->at(t);
    }
    cd omega_dot(double t) const {
        if (in_decouple(t)) return 0.0;
        if (drive->fn_dot) return drive->fn_dot(t);
        const double h = 1e-7 * (drive->t2 - drive->t1);
        return (omega(t + h) - omega(t - h)) / (2.0 * h);
    }
};

void apply_impulse(const TierContext& ctx, std::vector<cd>& y,
                   const Impulse& imp) {
    // Instantaneous rotation between S and the optically excited field
    // (P, or the cavity field E in the cavity-limited tiers):
    //   X' = cos(A) X + i e^{i nu} sin(A) S
    //   S' = cos(A) S + i e^{-i nu} sin(A) X
    const double ca = std::cos(imp.area), sa = std::sin(imp.area);
    const cd ph = std::exp(cd(0.0, imp.phase));
    const int ix = ctx.tier == ModelTier::Full ? 1 : 0;
    const int is = ctx.tier == ModelTier::Full ? 2 : 1;
    const cd X = y[ix], S = y[is];
    y[ix] = ca * X + kI * ph * sa * S;
    y[is] = ca * S + kI * std::conj(ph) * sa * X;
}

template <class EIn>
Trajectory run_simulation(const ControlDrive& drive, const MemoryParams& params,
                          ModelTier tier, double t1, double t2, cd S_init,
                          EIn&& e_in_fn, const SimOptions& opt) {
    TierContext ctx(tier, params);
    DriveView dv{&drive, opt.finite_decouple_omega};
    const double gN = params.g_sqrtN;
    const double g2N = gN * gN;

    std::vector<cd> y(ctx.state_size(), 0.0);
    y[ctx.n_fields - 1] = S_init;
    if (tier == ModelTier::CavityLimitedSpecial) {
        // The cavity amplitude is slaved to -Omega S/(g sqrtN). An onset
        // impulse at t1 rotates the empty cavity exactly onto that manifold,
        // so the slaved preload only applies when no such impulse exists.
        bool impulse_at_start = false;
        for (const auto& imp : drive.impulses)
            if (std::abs(imp.t - t1) <= 1e-12 * (t2 - t1)) impulse_at_start = true;
        if (!impulse_at_start) y[0] = -dv.omega(t1) * S_init / gN;
    }

    Trajectory traj;
    traj.tier = tier;
    traj.S0_norm2 = std::norm(S_init);
    traj.has_target = opt.target != nullptr;
    if (opt.target) traj.target_used = *opt.target;

    auto p_norm2 = [&](double t, const std::vector<cd>& v, cd e_in, cd omega,
                       bool dec) -> double {
        switch (tier) {
            case ModelTier::Full: return std::norm(v[1]);
            case ModelTier::AtomLimited:
            case ModelTier::AtomLimitedLossless: return std::norm(v[0]);
            case ModelTier::CavityLimited:
                if (dec) return 0.0;
                return std::norm((gN * v[0] + omega * v[1]) / ctx.dpol);
            case ModelTier::CavityLimitedSpecial: {
                if (dec) return 0.0;
                const cd omega_dot = dv.omega_dot(t);
                const cd S = v[1];
                const cd sdot = ctx.special_sdot(S, e_in, omega, omega_dot);
                const cd edot = -(omega_dot * S + omega * sdot) / gN;
                const cd P = (edot + ctx.rates.kappa * v[0] -
                              std::sqrt(2.0 * params.kappa_in) * e_in) /
                             (kI * gN);
                return std::norm(P);
            }
        }
        return 0.0;
    };

    auto rhs = [&](double t, const std::vector<cd>& v, std::vector<cd>& d) {
        const cd e_in = e_in_fn(t);
        const bool dec = dv.in_decouple(t) && tier != ModelTier::Full;
        const cd omega = dec ? cd(0.0) : dv.omega(t);
        switch (tier) {
            case ModelTier::Full: {
                const cd E = v[0], P = v[1], S = v[2];
                d[0] = -ctx.rates.kappa * E + kI * gN * P +
                       std::sqrt(2.0 * params.kappa_in) * e_in;
                d[1] = -ctx.dpol * P + kI * gN * E + kI * omega * S;
                d[2] = kI * std::conj(omega) * P;
                break;
            }
            case ModelTier::AtomLimited: {
                const cd P = v[0], S = v[1];
                const double gt = ctx.rates.Gamma_tilde;
                d[0] = -cd(gt, params.delta) * P + kI * omega * S +
                       kI * std::sqrt(2.0 * gt) * ctx.q * e_in;
                d[1] = kI * std::conj(omega) * P;
                break;
            }
            case ModelTier::AtomLimitedLossless: {
                const cd P = v[0], S = v[1];
                const double G = ctx.rates.Gamma;
                d[0] = -cd(G, params.delta) * P + kI * omega * S +
                       kI * std::sqrt(2.0 * G) * e_in;
                d[1] = kI * std::conj(omega) * P;
                break;
            }
            case ModelTier::CavityLimited: {
                const cd E = v[0], S = v[1];
                if (dec) {
                    d[0] = -ctx.rates.kappa * E +
                           std::sqrt(2.0 * params.kappa_in) * e_in;
                    d[1] = 0.0;
                } else {
                    d[0] = -(ctx.rates.kappa + g2N / ctx.dpol) * E -
                           gN * omega / ctx.dpol * S +
                           std::sqrt(2.0 * params.kappa_in) * e_in;
                    d[1] = -std::norm(omega) / ctx.dpol * S -
                           gN * std::conj(omega) / ctx.dpol * E;
                }
                break;
            }
            case ModelTier::CavityLimitedSpecial: {
                const cd E = v[0], S = v[1];
                if (dec) {
                    d[0] = -ctx.rates.kappa * E +
                           std::sqrt(2.0 * params.kappa_in) * e_in;
                    d[1] = 0.0;
                } else {
                    const cd omega_dot = dv.omega_dot(t);
                    const cd sdot = ctx.special_sdot(S, e_in, omega, omega_dot);
                    d[1] = sdot;
                    d[0] = -(omega_dot * S + omega * sdot) / gN;
                }
                break;
            }
        }
        const cd e_out = ctx.e_out(v, e_in);
        d[ctx.i_out2] = std::norm(e_out);
        d[ctx.i_in2] = std::norm(e_in);
        d[ctx.i_p2] = p_norm2(t, v, e_in, omega, dec);
        d[ctx.i_ovl] =
            opt.target ? std::conj(opt.target->eval(t)) * e_out : cd(0.0);
    };

    const double init_sum = ctx.excitation_sum(y);

    auto observe = [&](double t, const std::vector<cd>& v) {
        const cd e_in = e_in_fn(t);
        traj.t.push_back(t);
        if (tier == ModelTier::Full) {
            traj.E.push_back(v[0]);
            traj.P.push_back(v[1]);
            traj.S.push_back(v[2]);
        } else if (ctx.has_cavity_field()) {
            traj.E.push_back(v[0]);
            traj.S.push_back(v[1]);
        } else {
            traj.P.push_back(v[0]);
            traj.S.push_back(v[1]);
        }
        traj.E_out.push_back(ctx.e_out(v, e_in));
        traj.out_norm.push_back(v[ctx.i_out2].real());
        traj.in_norm.push_back(v[ctx.i_in2].real());
        traj.p2.push_back(v[ctx.i_p2].real());
        traj.conservation.push_back(ctx.excitation_sum(v) +
                                    v[ctx.i_out2].real() -
                                    v[ctx.i_in2].real() - init_sum);
    };

    // Breakpoints: impulses, critical times, decoupling window edges.
    const double tol_t = 1e-12 * (t2 - t1);
    std::vector<double> events;
    for (const auto& imp : drive.impulses) events.push_back(imp.t);
    for (double tc : drive.critical_times) events.push_back(tc);
    if (drive.post_tc_mode == PostTcMode::Decouple &&
        drive.decouple_from < drive.decouple_to) {
        events.push_back(drive.decouple_from);
        events.push_back(drive.decouple_to);
    }
    events.push_back(t2);
    std::sort(events.begin(), events.end());
    events.erase(std::unique(events.begin(), events.end(),
                             [&](double a, double b) {
                                 return std::abs(a - b) < tol_t;
                             }),
                 events.end());

    std::vector<bool> applied(drive.impulses.size(), false);
    auto apply_impulses_at = [&](double tp) {
        for (std::size_t i = 0; i < drive.impulses.size(); ++i) {
            if (!applied[i] && std::abs(drive.impulses[i].t - tp) <= tol_t) {
                apply_impulse(ctx, y, drive.impulses[i]);
                applied[i] = true;
            }
        }
    };

    OdeOptions ode;
    ode.rel_tol = opt.rel_tol;
    ode.abs_tol = opt.abs_tol;

    double t_cur = t1;
    apply_impulses_at(t_cur);
    bool first = true;
    for (double te : events) {
        if (te < t1 - tol_t || te > t2 + tol_t) continue;
        if (te - t_cur > tol_t) {
            auto obs = [&](double t, const std::vector<cd>& v) {
                if (!first && t == t_cur) return;  // segment-start duplicate
                observe(t, v);
            };
            integrate_rk45(rhs, y, t_cur, te, ode, obs);
            first = false;
            t_cur = te;
        }
        apply_impulses_at(te);
    }
    if (traj.t.empty() || traj.t.back() < t2 - tol_t) observe(t2, y);

    traj.target_overlap = y[ctx.i_ovl];
    return traj;
}

}  // namespace

std::string to_string(ModelTier tier) {
    switch (tier) {
        case ModelTier::Full: return "full";
        case ModelTier::AtomLimited: return "atom-limited";
        case ModelTier::AtomLimitedLossless: return "atom-limited-lossless";
        case ModelTier::CavityLimited: return "cavity-limited";
        case ModelTier::CavityLimitedSpecial: return "cavity-limited-special";
    }
    return "?";
}

Trajectory simulate_retrieval(const ControlDrive& drive,
                              const MemoryParams& params, ModelTier tier,
                              double t1, double t2, cd S_init,
                              const SimOptions& opt) {
    if (std::norm(S_init) > 1.0 + 1e-12)
        throw std::invalid_argument("|S_init| must be <= 1");
    return run_simulation(drive, params, tier, t1, t2, S_init,
                          [](double) { return cd(0.0); }, opt);
}

StorageResult simulate_storage(const ControlDrive& drive,
                               const PulseShape& target,
                               const MemoryParams& params, ModelTier tier,
                               const SimOptions& opt) {
    const double t1 = drive.t1, t2 = drive.t2;
    auto e_in = [&target, t1, t2](double t) {
        return std::conj(target.eval(t1 + t2 - t));
    };
    Trajectory traj =
        run_simulation(drive, params, tier, t1, t2, 0.0, e_in, opt);
    StorageResult res{std::move(traj), 0.0};
    const double injected = res.traj.in_norm.back();
    if (injected > 0.0)
        res.eta_s = std::norm(res.traj.S.back()) / injected;
    return res;
}

ControlDrive time_reverse_drive(const ControlDrive& drive, double t1,
                                double t2) {
    const double mirror = t1 + t2;
    ControlDrive rev;
    rev.t1 = t1;
    rev.t2 = t2;
    rev.post_tc_mode = drive.post_tc_mode;
    rev.decouple_omega = drive.decouple_omega;
    const std::size_t n = drive.t.size();
    rev.t.resize(n);
    rev.omega.resize(n);
    rev.theta.resize(drive.theta.size());
    for (std::size_t i = 0; i < n; ++i) {
        rev.t[i] = mirror - drive.t[n - 1 - i];
        rev.omega[i] = std::conj(drive.omega[n - 1 - i]);
    }
    for (std::size_t i = 0; i < drive.theta.size(); ++i)
        rev.theta[i] = -drive.theta[drive.theta.size() - 1 - i];
    for (const auto& imp : drive.impulses)
        rev.impulses.push_back({mirror - imp.t, imp.area, -imp.phase});
    std::sort(rev.impulses.begin(), rev.impulses.end(),
              [](const Impulse& a, const Impulse& b) { return a.t < b.t; });
    for (double tc : drive.critical_times)
        rev.critical_times.push_back(mirror - tc);
    std::sort(rev.critical_times.begin(), rev.critical_times.end());
    if (drive.decouple_from < drive.decouple_to) {
        rev.decouple_from = mirror - drive.decouple_to;
        rev.decouple_to = mirror - drive.decouple_from;
    }
    if (drive.fn) {
        rev.fn = [fn = drive.fn, mirror](double t) {
            return std::conj(fn(mirror - t));
        };
    }
    if (drive.fn_dot) {
        rev.fn_dot = [fd = drive.fn_dot, mirror](double t) {
            return -std::conj(fd(mirror - t));
        };
    }
    return rev;
}

double overlap_efficiency(const Trajectory& traj, const PulseShape& target) {
    if (traj.S0_norm2 <= 0.0) return 0.0;
    if (traj.has_target && traj.target_used.same_as(target))
        return std::norm(traj.target_overlap) / traj.S0_norm2;
    ComplexSpline eout(traj.t, traj.E_out);
    const cd ovl = integrate_complex(
        [&](double t) { return std::conj(target.eval(t)) * eout(t); },
        traj.t.front(), traj.t.back(), 1e-12, 1e-10);
    return std::norm(ovl) / traj.S0_norm2;
}

double loss_probability(const Trajectory& traj, double gamma) {
    if (gamma == 0.0) return 0.0;
    return 2.0 * gamma * traj.p2.back();
}

AdiabaticGap adiabatic_validity(const ControlDrive& drive,
                                const MemoryParams& params, ModelTier reduced,
                                const PulseShape& target,
                                const SimOptions& opt) {
    SimOptions o = opt;
    o.target = &target;
    const Trajectory red = simulate_retrieval(drive, params, reduced, drive.t1,
                                              drive.t2, 1.0, o);
    const Trajectory full = simulate_retrieval(drive, params, ModelTier::Full,
                                               drive.t1, drive.t2, 1.0, o);
    AdiabaticGap g{};
    g.eta_reduced = overlap_efficiency(red, target);
    g.eta_full = overlap_efficiency(full, target);
    g.gap = std::abs(g.eta_reduced - g.eta_full);
    const DerivedRates d = derived(params);
    const double tau = target.tau();
    if (reduced == ModelTier::CavityLimited ||
        reduced == ModelTier::CavityLimitedSpecial) {
        g.predicted_scale =
            1.0 / (d.Gamma * tau) * (1.0 + 1.0 / (d.kappa * tau));
    } else {
        g.predicted_scale = 1.0 / (d.kappa * tau);
    }
    return g;
}

}  // namespace cavmem
