#include "cavmem/control.hpp"

#include "cavmem/quadrature.hpp"
#include "cavmem/roots.hpp"
#include "cavmem/spline.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>

namespace cavmem {

namespace {

using cd = std::complex<double>;

constexpr int kScanPoints = 8192;
constexpr int kMaxFixedPoint = 200;
constexpr double kFixedPointTol = 1e-10;

// Scan grid over [a,b], cubically clustered about the window centre. The
// wide windows of slowly decaying shapes stay covered out to their tails
// while the pulse core, where the rate constraint actually binds, is
// sampled densely.
std::vector<double> scan_grid(double a, double b, int n = kScanPoints) {
    std::vector<double> t(n);
    const double c0 = 0.5 * (a + b), half = 0.5 * (b - a);
    for (int i = 0; i < n; ++i) {
        const double u = -1.0 + 2.0 * i / (n - 1);
        t[i] = c0 + half * u * u * u;
    }
    t.front() = a;
    t.back() = b;
    return t;
}

// integral of conj(phi(t)) exp(-R (t-a)) dt over [a,b]; closed form for the
// pure exponential families, quadrature otherwise.
cd exp_weighted_overlap(const PulseShape& shape, double a, double b, double R) {
    if (b <= a) return 0.0;
    const bool pure_exp = (shape.kind() == ShapeKind::DecreasingExp ||
                           shape.kind() == ShapeKind::IncreasingExp) &&
                          shape.onset_offset() == 0.0;
    if (pure_exp) {
        const double tau = shape.tau();
        const double sgn = shape.kind() == ShapeKind::DecreasingExp ? -1.0 : 1.0;
        const double k = sgn / (2.0 * tau) - R;
        const double L = b - a;
        const double attn = k == 0.0 ? L : std::expm1(k * L) / k;
        return std::exp(sgn * a / (2.0 * tau)) /
               (std::sqrt(tau) * shape.norm()) * attn;
    }
    return integrate_complex(
        [&](double t) {
            return std::conj(shape.eval(t)) * std::exp(-R * (t - a));
        },
        a, b, 5e-14, 1e-12);
}

double constraint_margin(const PulseShape& shape, double rate, double c,
                         double t) {
    // D(t) = 2 rate (1 - c^2 F(t)) - c^2 |phi(t)|^2 written via the tail
    // integral so that F -> 1 does not lose precision.
    const double one_minus_c2 = -(c - 1.0) * (c + 1.0);
    return 2.0 * rate * (one_minus_c2 + c * c * shape.tail_intensity(t)) -
           c * c * shape.intensity(t);
}

}  // namespace

std::complex<double> RetrievalMap::psi(double t) const {
    for (const auto& seg : segments) {
        if (t < seg.t_start || t > seg.t_end) continue;
        if (seg.kind == SegmentKind::ScaledShape) return seg.scale * shape.eval(t);
        return seg.scale * std::exp(-rate * (t - seg.t_start));
    }
    return 0.0;
}

std::complex<double> RetrievalMap::psi_dot(double t) const {
    for (const auto& seg : segments) {
        if (t < seg.t_start || t > seg.t_end) continue;
        if (seg.kind == SegmentKind::ScaledShape)
            return seg.scale * shape.derivative(t);
        return -rate * seg.scale * std::exp(-rate * (t - seg.t_start));
    }
    return 0.0;
}

double RetrievalMap::cum_intensity(double t) const {
    double acc = 0.0;
    for (const auto& seg : segments) {
        if (t <= seg.t_start) break;
        const double te = std::min(t, seg.t_end);
        if (seg.kind == SegmentKind::ScaledShape) {
            acc += std::norm(seg.scale) * (shape.cum_intensity(te) -
                                           shape.cum_intensity(seg.t_start));
        } else {
            acc += std::norm(seg.scale) *
                   -std::expm1(-2.0 * rate * (te - seg.t_start)) / (2.0 * rate);
        }
    }
    return acc;
}

double RetrievalMap::total_intensity() const { return cum_intensity(t_end()); }

std::optional<double> find_critical_time(const PulseShape& shape, double rate,
                                         double c) {
    if (!(c > 0) || !(rate > 0))
        throw std::invalid_argument("find_critical_time: need c > 0, rate > 0");
    const double lo = shape.lo(), hi = shape.hi();
    auto D = [&](double t) { return constraint_margin(shape, rate, c, t); };

    const auto grid = scan_grid(lo, hi);
    double d_prev = D(lo);
    if (d_prev <= 0.0) return lo;  // violated at the initial time, t_c = t1
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const double d = D(grid[i]);
        if (d <= 0.0)
            return bisect(D, grid[i - 1], grid[i], d_prev, d,
                          1e-12 * shape.tau());
        d_prev = d;
    }
    return std::nullopt;
}

RetrievalMap map_at_c(const PulseShape& shape, double rate, double c) {
    RetrievalMap map;
    map.shape = shape;
    map.rate = rate;
    map.c = c;
    const double lo = shape.lo(), hi = shape.hi();
    const auto tc = find_critical_time(shape, rate, c);
    if (!tc) {
        map.segments = {{lo, hi, SegmentKind::ScaledShape, c}};
        return map;
    }
    if (*tc <= lo) {
        // Fast retrieval: all excitations moved to the excited state at t1,
        // then read out at the maximal rate. c is pinned by that rate.
        map.degenerate_fast = true;
        map.c = std::sqrt(2.0 * rate) / std::abs(shape.eval(lo));
        map.critical_times = {lo};
        map.segments = {{lo, hi, SegmentKind::ExpDecay, std::sqrt(2.0 * rate)}};
        return map;
    }
    map.critical_times = {*tc};
    map.segments = {{lo, *tc, SegmentKind::ScaledShape, c},
                    {*tc, hi, SegmentKind::ExpDecay, c * shape.eval(*tc)}};
    return map;
}

double overlap_eta(const RetrievalMap& map) {
    cd acc = 0.0;
    for (const auto& seg : map.segments) {
        if (seg.kind == SegmentKind::ScaledShape) {
            acc += seg.scale * (map.shape.cum_intensity(seg.t_end) -
                                map.shape.cum_intensity(seg.t_start));
        } else {
            acc += seg.scale * exp_weighted_overlap(map.shape, seg.t_start,
                                                    seg.t_end, map.rate);
        }
    }
    return std::norm(acc);
}

double eta_at_c(const PulseShape& shape, double rate, double c) {
    return overlap_eta(map_at_c(shape, rate, c));
}

namespace {

PipelineResult run_fixed_point(
    const std::function<double(double)>& eta_of_c,
    const std::function<RetrievalMap(double)>& map_of_c) {
    PipelineResult res;
    double c = 1.0;
    double lambda = 1.0;
    double prev_step = 0.0;
    for (int k = 0; k < kMaxFixedPoint; ++k) {
        RetrievalMap map = map_of_c(c);
        if (map.degenerate_fast) {
            res.map = std::move(map);
            res.eta = overlap_eta(res.map);
            res.c = res.map.c;
            res.iterations = k;
            return res;
        }
        const double eta = eta_of_c(c);
        const double target = 1.0 / std::sqrt(eta);
        const double next = (1.0 - lambda) * c + lambda * target;
        const double step = next - c;
        if (std::abs(step) < kFixedPointTol) {
            res.c = next;
            res.map = map_of_c(next);
            res.eta = eta_of_c(next);
            res.iterations = k + 1;
            return res;
        }
        if (step * prev_step < 0.0) lambda = std::max(lambda / 2.0, 1.0 / 64.0);
        prev_step = step;
        c = next;
        if (k + 1 == kMaxFixedPoint) {
            std::ostringstream msg;
            msg.precision(17);
            msg << "fixed point for c did not converge in " << kMaxFixedPoint
                << " iterations; last iterates " << c - step << ", " << c;
            throw ConvergenceError(msg.str());
        }
    }
    return res;  // unreachable
}

}  // namespace

PipelineResult optimize_c(const PulseShape& shape, double rate) {
    if (!(rate > 0)) throw std::invalid_argument("optimize_c: rate > 0 required");
    // No violation at c = 1: the map can follow phi exactly and eta = 1.
    if (!find_critical_time(shape, rate, 1.0)) {
        PipelineResult res;
        res.c = 1.0;
        res.eta = 1.0;
        res.map = map_at_c(shape, rate, 1.0);
        return res;
    }
    return run_fixed_point([&](double c) { return eta_at_c(shape, rate, c); },
                           [&](double c) { return map_at_c(shape, rate, c); });
}

PipelineResult two_tc_map(const PulseShape& shape, double rate) {
    PipelineResult base = optimize_c(shape, rate);
    if (base.map.critical_times.empty() || base.map.degenerate_fast) {
        base.map.two_tc_fallback = true;
        return base;
    }
    const double tc1_seed = base.map.critical_times.front();
    const double hi = shape.hi();

    // The norm condition for t_c^(2) reduces to Q(t) = 2 rate T(t) - |phi|^2
    // changing sign from - to +: the last such crossing leaves the rescaled
    // shape segment feasible all the way to t2.
    auto Q = [&](double t) {
        return 2.0 * rate * shape.tail_intensity(t) - shape.intensity(t);
    };
    double tc2 = 0.0;
    bool found = false;
    const auto grid = scan_grid(tc1_seed, hi);
    double q_prev = Q(grid.front());
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const double q = Q(grid[i]);
        if (q_prev < 0.0 && q >= 0.0) {
            tc2 = bisect(Q, grid[i - 1], grid[i], q_prev, q,
                         1e-12 * shape.tau());
            found = true;
        }
        q_prev = q;
    }
    if (!found) {
        base.map.two_tc_fallback = true;
        return base;
    }

    auto build = [&](double c) {
        RetrievalMap map;
        map.shape = shape;
        map.rate = rate;
        map.c = c;
        const auto tc1 = find_critical_time(shape, rate, c);
        if (!tc1 || *tc1 <= shape.lo() || *tc1 >= tc2) {
            RetrievalMap fallback = map_at_c(shape, rate, c);
            fallback.two_tc_fallback = true;
            return fallback;
        }
        const cd amp = c * shape.eval(*tc1);
        const cd scale2 = amp * std::exp(-rate * (tc2 - *tc1)) / shape.eval(tc2);
        map.critical_times = {*tc1, tc2};
        map.segments = {{shape.lo(), *tc1, SegmentKind::ScaledShape, c},
                        {*tc1, tc2, SegmentKind::ExpDecay, amp},
                        {tc2, hi, SegmentKind::ScaledShape, scale2}};
        return map;
    };
    return run_fixed_point([&](double c) { return overlap_eta(build(c)); },
                           build);
}

CLeqOneResult c_leq_one_eta(const PulseShape& shape, double rate) {
    // Largest c with c^2 (|phi|^2 + 2 rate F) <= 2 rate everywhere.
    const double lo = shape.lo(), hi = shape.hi();
    auto M = [&](double t) {
        return shape.intensity(t) + 2.0 * rate * shape.cum_intensity(t);
    };
    const auto grid = scan_grid(lo, hi);
    std::size_t best_i = 0;
    double best = M(lo);
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const double m = M(grid[i]);
        if (m > best) {
            best = m;
            best_i = i;
        }
    }
    // Ternary-search refinement around the best grid point.
    double a = grid[best_i > 0 ? best_i - 1 : 0];
    double b = grid[std::min(best_i + 1, grid.size() - 1)];
    for (int it = 0; it < 80; ++it) {
        const double m1 = a + (b - a) / 3.0, m2 = b - (b - a) / 3.0;
        if (M(m1) < M(m2))
            a = m1;
        else
            b = m2;
    }
    best = std::max(best, M(0.5 * (a + b)));
    CLeqOneResult r{};
    r.c = std::min(1.0, std::sqrt(2.0 * rate / best));
    r.eta = r.c * r.c;
    return r;
}

// ---------------------------------------------------------------------------
// Drive synthesis.

namespace {

struct SynthCore {
    RetrievalMap map;
    double rate;        // limiting rate (Gamma or kappa)
    double delta;
    double t_cut;       // end of the regular formula (t_c or window end)
    double eps_dead;    // excluded neighbourhood of t_cut
    bool theta_trivial;
    CubicSpline theta;  // cumulative phase of S on [t1, t_cut - eps]

    double den2(double t) const {
        const cd p = map.psi(t);
        return 2.0 * rate - std::norm(p) - 2.0 * rate * map.cum_intensity(t);
    }
    double theta_at(double t) const {
        if (theta_trivial) return 0.0;
        return theta(std::clamp(t, theta.front(), theta.back()));
    }
};

bool map_is_real(const RetrievalMap& map) {
    if (map.shape.kind() == ShapeKind::Tabulated) return false;
    for (const auto& seg : map.segments)
        if (seg.scale.imag() != 0.0) return false;
    return map.shape.onset_offset().imag() == 0.0;
}

// Cumulative phase of S. theta_dot grows like 1/(t_sing - t) toward the
// critical time, so the integration runs in v = log(t_sing - t), which
// flattens the pole; the grid is log-uniform in the distance to t_sing.
CubicSpline accumulate_theta(const std::function<double(double)>& theta_dot,
                             double a, double b, double t_sing) {
    const int n = 1025;
    std::vector<double> t(n), th(n);
    const double v_hi = std::log(t_sing - a);
    const double v_lo = std::log(t_sing - b);
    for (int i = 0; i < n; ++i)
        t[i] = t_sing - std::exp(v_hi + (v_lo - v_hi) * double(i) / (n - 1));
    t.front() = a;
    t.back() = b;
    auto g = [&](double v) {
        const double s = std::exp(v);
        return theta_dot(t_sing - s) * s;
    };
    th[0] = 0.0;
    // The flattened integrand carries ~1e-11 cancellation noise from the
    // vanishing denominator; a tighter tolerance would only make the
    // adaptive estimator chase that noise.
    for (int i = 1; i < n; ++i) {
        const double va = std::log(t_sing - t[i - 1]);
        const double vb = std::log(t_sing - t[i]);
        th[i] = th[i - 1] + integrate(g, vb, va, 1e-10, 1e-8);
    }
    return CubicSpline(std::move(t), std::move(th));
}

// The onset impulse prepares X(t1+) (X = P in the atom-limited regime, E in
// the cavity-limited one) from S via the rotation
//   X' = cos(A) X + i e^{i nu} sin(A) S,  S' = cos(A) S + i e^{-i nu} sin(A) X.
// The required nu differs because P = psi S/(i sqrt(2 Gamma)) carries an
// extra factor of -i relative to E = psi S/sqrt(2 kappa).
void append_onset_impulse(ControlDrive& drive, cd psi0, double rate_cap,
                          bool cavity) {
    const double ratio = std::abs(psi0) / std::sqrt(2.0 * rate_cap);
    if (ratio < 1e-12) return;
    Impulse imp;
    imp.t = drive.t1;
    imp.area = std::asin(std::min(1.0, ratio));
    imp.phase = std::arg(cavity ? cd(0.0, -1.0) * psi0 : -psi0);
    drive.impulses.push_back(imp);
}

void sample_drive(ControlDrive& drive, int n = 2048) {
    drive.t.resize(n);
    drive.omega.resize(n);
    drive.theta.resize(n);
    for (int i = 0; i < n; ++i) {
        const double t = drive.t1 + (drive.t2 - drive.t1) * i / double(n - 1);
        drive.t[i] = t;
        drive.omega[i] = drive.fn(t);
        drive.theta[i] = 0.0;
    }
}

void validate_feasible(const SynthCore& core) {
    const double a = core.map.t_begin();
    const double b = core.t_cut - core.eps_dead;
    for (int i = 0; i < 512; ++i) {
        const double t = a + (b - a) * i / 511.0;
        if (core.den2(t) < -1e-9 * core.rate) {
            std::ostringstream msg;
            msg << "drive denominator nonpositive at t = " << t
                << " (map violates the rate constraint before t_c)";
            throw std::invalid_argument(msg.str());
        }
    }
}

}  // namespace

std::complex<double> ControlDrive::at(double time) const {
    if (fn) return fn(time);
    if (t.empty() || time < t.front() || time > t.back()) return 0.0;
    const auto it = std::upper_bound(t.begin(), t.end(), time);
    const std::size_t i = it == t.begin() ? 0 : (it - t.begin()) - 1;
    if (i + 1 >= t.size()) return omega.back();
    const double w = (time - t[i]) / (t[i + 1] - t[i]);
    return omega[i] * (1.0 - w) + omega[i + 1] * w;
}

ControlDrive synthesize_omega_atom(const RetrievalMap& map, double delta,
                                   double Gamma) {
    if (std::abs(Gamma - map.rate) > 1e-9 * std::max(1.0, map.rate))
        throw std::invalid_argument(
            "synthesize_omega_atom: map was built for a different rate");

    ControlDrive drive;
    drive.t1 = map.t_begin();
    drive.t2 = map.t_end();
    drive.post_tc_mode = PostTcMode::Zero;
    drive.critical_times = map.critical_times;
    append_onset_impulse(drive, map.psi(drive.t1), Gamma, false);

    if (map.degenerate_fast) {
        // Single pi/2 impulse, then free decay.
        drive.fn = [](double) { return cd(0.0); };
        drive.fn_dot = drive.fn;
        sample_drive(drive);
        return drive;
    }

    auto core = std::make_shared<SynthCore>();
    core->map = map;
    core->rate = Gamma;
    core->delta = delta;
    core->t_cut = map.critical_times.empty() ? map.t_end()
                                             : map.critical_times.front();
    core->eps_dead = 1e-6 / Gamma;
    core->theta_trivial = delta == 0.0 && map_is_real(map);
    if (!core->theta_trivial) {
        auto theta_dot = [core](double t) {
            const cd p = core->map.psi(t);
            const cd pd = core->map.psi_dot(t);
            return (core->delta * std::norm(p) -
                    std::imag(p * std::conj(pd))) /
                   core->den2(t);
        };
        core->theta = accumulate_theta(theta_dot, drive.t1,
                                       core->t_cut - core->eps_dead,
                                       core->t_cut);
    }
    validate_feasible(*core);

    const double t_stop = core->t_cut - core->eps_dead;
    drive.fn = [core, delta, Gamma, t_stop](double t) -> cd {
        if (t < core->map.t_begin() || t >= t_stop) return 0.0;
        const cd p = core->map.psi(t);
        const cd pd = core->map.psi_dot(t);
        const double den = std::sqrt(std::max(core->den2(t), 1e-14 * Gamma));
        const cd num = -(pd + cd(Gamma, delta) * p);
        return num * std::exp(cd(0.0, -core->theta_at(t))) / den;
    };
    drive.fn_dot = [core, delta, Gamma, t_stop, fn = drive.fn](double t) -> cd {
        const double h = 1e-7 / Gamma;
        if (t - h < core->map.t_begin() || t + h >= t_stop) return 0.0;
        return (fn(t + h) - fn(t - h)) / (2.0 * h);
    };
    sample_drive(drive);
    if (!core->theta_trivial)
        for (std::size_t i = 0; i < drive.t.size(); ++i)
            drive.theta[i] = core->theta_at(std::min(drive.t[i], t_stop));
    return drive;
}

ControlDrive synthesize_omega_cavity(const RetrievalMap& map,
                                     const MemoryParams& params,
                                     double decouple_mult) {
    const DerivedRates d = derived(params);
    if (std::abs(d.kappa - map.rate) > 1e-9 * std::max(1.0, map.rate))
        throw std::invalid_argument(
            "synthesize_omega_cavity: map was built for a different rate");
    const double kappa = d.kappa;
    const double gN = params.g_sqrtN;
    const double g2N = gN * gN;
    const cd dden(params.gamma, params.delta);
    const bool special = params.gamma == 0.0 && params.delta == 0.0;

    ControlDrive drive;
    drive.t1 = map.t_begin();
    drive.t2 = map.t_end();
    drive.post_tc_mode = PostTcMode::Decouple;
    drive.critical_times = map.critical_times;
    drive.decouple_omega = decouple_mult * gN;
    append_onset_impulse(drive, map.psi(drive.t1), kappa, true);

    auto core = std::make_shared<SynthCore>();
    core->map = map;
    core->rate = kappa;
    core->delta = params.delta;
    core->t_cut = map.critical_times.empty() ? map.t_end()
                                             : map.critical_times.front();
    core->eps_dead = 1e-6 / kappa;
    drive.decouple_from = core->t_cut;
    drive.decouple_to = drive.t2;
    core->theta_trivial = params.delta == 0.0 && map_is_real(map);
    if (!core->theta_trivial) {
        auto theta_dot = [core, kappa, g2N, dden, special,
                          gamma = params.gamma,
                          delta = params.delta](double t) {
            const cd p = core->map.psi(t);
            const cd pd = core->map.psi_dot(t);
            const double den2 = core->den2(t);
            if (special) return std::imag(p * std::conj(pd)) / den2;
            const cd W = pd + (kappa + g2N / dden) * p;
            const cd u = std::conj(dden) / dden;
            const double g2d2 = gamma * gamma + delta * delta;
            return (delta * std::norm(W) / g2N -
                    delta * std::norm(p) * (g2N + 2.0 * gamma * kappa) / g2d2 +
                    std::imag(u * p * std::conj(pd))) /
                   den2;
        };
        core->theta = accumulate_theta(theta_dot, drive.t1,
                                       core->t_cut - core->eps_dead,
                                       core->t_cut);
    }
    validate_feasible(*core);

    const double t_stop = core->t_cut - core->eps_dead;
    const double omega_dec = drive.decouple_omega;
    drive.fn = [core, kappa, gN, g2N, dden, special, t_stop,
                omega_dec](double t) -> cd {
        if (t < core->map.t_begin()) return 0.0;
        if (t >= t_stop) return omega_dec;
        const cd p = core->map.psi(t);
        const cd pd = core->map.psi_dot(t);
        const double den = gN * std::sqrt(std::max(core->den2(t), 1e-14 * kappa));
        const cd num = special ? -g2N * p : -(dden * pd + (dden * kappa + g2N) * p);
        return num * std::exp(cd(0.0, -core->theta_at(t))) / den;
    };
    drive.fn_dot = [core, t_stop, kappa, fn = drive.fn](double t) -> cd {
        const double h = 1e-7 / kappa;
        if (t - h < core->map.t_begin() || t + h >= t_stop) return 0.0;
        return (fn(t + h) - fn(t - h)) / (2.0 * h);
    };
    sample_drive(drive);
    if (!core->theta_trivial)
        for (std::size_t i = 0; i < drive.t.size(); ++i)
            drive.theta[i] = core->theta_at(std::min(drive.t[i], t_stop));
    return drive;
}

ControlDrive adiabatic_omega(const PulseShape& shape, double Gamma,
                             double delta) {
    ControlDrive drive;
    drive.t1 = shape.lo();
    drive.t2 = shape.hi();
    drive.post_tc_mode = PostTcMode::Zero;
    const double t_stop = drive.t2 - 1e-9 * (drive.t2 - drive.t1);
    drive.fn = [shape, Gamma, delta, t_stop](double t) -> cd {
        if (t < shape.lo() || t >= t_stop) return 0.0;
        const double T = std::max(shape.tail_intensity(t), 1e-300);
        const cd mag = -cd(Gamma, delta) / std::sqrt(2.0 * Gamma) *
                       shape.eval(t) / std::sqrt(T);
        if (delta == 0.0) return mag;
        // The phase integral of |Omega|^2 evaluates in closed form:
        // accumulated |Omega|^2 = (Gamma^2+Delta^2)/(2 Gamma) * (-log T).
        return mag * std::pow(T, cd(0.0, delta / (2.0 * Gamma)));
    };
    drive.fn_dot = [shape, Gamma, fn = drive.fn, t_stop](double t) -> cd {
        const double h = 1e-7 * shape.tau();
        if (t - h < shape.lo() || t + h >= t_stop) return 0.0;
        return (fn(t + h) - fn(t - h)) / (2.0 * h);
    };
    sample_drive(drive);
    return drive;
}

}  // namespace cavmem
