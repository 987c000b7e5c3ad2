#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "cavmem/dynamics.hpp"
#include "cavmem/spline.hpp"

#include <algorithm>
#include <cmath>
#include <random>

using namespace cavmem;
using cd = std::complex<double>;

namespace {

ControlDrive knot_drive(std::mt19937& rng, double t1, double t2, double scale,
                        int n_impulses, int nk = 24) {
    std::normal_distribution<double> g(0.0, scale);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    std::vector<double> kt(nk);
    std::vector<cd> kv(nk);
    for (int i = 0; i < nk; ++i) {
        kt[i] = t1 + (t2 - t1) * i / (nk - 1);
        kv[i] = cd(g(rng), g(rng));
    }
    auto sp = std::make_shared<ComplexSpline>(kt, kv);
    ControlDrive d;
    d.t1 = t1;
    d.t2 = t2;
    d.fn = [sp, t1, t2](double t) -> cd {
        if (t < t1 || t > t2) return 0.0;
        return (*sp)(t);
    };
    d.t = kt;
    d.omega.assign(kv.begin(), kv.end());
    for (int k = 0; k < n_impulses; ++k) {
        Impulse imp;
        imp.t = t1 + (0.15 + 0.7 * u01(rng)) * (t2 - t1);
        imp.area = u01(rng) * M_PI / 2.0;
        imp.phase = (2.0 * u01(rng) - 1.0) * M_PI;
        d.impulses.push_back(imp);
    }
    std::sort(d.impulses.begin(), d.impulses.end(),
              [](const Impulse& a, const Impulse& b) { return a.t < b.t; });
    return d;
}

MemoryParams lossless_atom(double Gamma, double delta = 0.0) {
    MemoryParams p;
    p.kappa_in = 50.0 * Gamma;
    p.g_sqrtN = std::sqrt(Gamma * p.kappa_in);
    p.gamma = 0.0;
    p.kappa_loss = 0.0;
    p.delta = delta;
    return p;
}

}  // namespace

TEST_CASE("undriven retrieval keeps the spin wave frozen") {
    ControlDrive d;
    d.t1 = 0.0;
    d.t2 = 5.0;
    d.fn = [](double) { return cd(0.0); };
    const auto traj = simulate_retrieval(d, lossless_atom(1.0),
                                         ModelTier::AtomLimitedLossless, 0.0,
                                         5.0, 1.0);
    CHECK(std::abs(traj.S.back() - 1.0) < 1e-12);
    for (const auto& e : traj.E_out) CHECK(std::abs(e) < 1e-12);
    CHECK(traj.out_norm.back() < 1e-12);
}

TEST_CASE("pi/2 impulse releases the fast exponential") {
    // Impulse at t = 0, no further drive: E_out = sqrt(2) e^{-t} (Gamma = 1)
    // up to a constant phase.
    ControlDrive d;
    d.t1 = 0.0;
    d.t2 = 20.0;
    d.fn = [](double) { return cd(0.0); };
    d.impulses.push_back({0.0, M_PI / 2.0, M_PI});
    const auto target = PulseShape::decreasing_exp(0.25);
    SimOptions opt;
    opt.target = &target;
    const auto traj = simulate_retrieval(d, lossless_atom(1.0),
                                         ModelTier::AtomLimitedLossless, 0.0,
                                         20.0, 1.0, opt);
    for (std::size_t i = 0; i < traj.t.size(); i += 50) {
        const double expect = std::sqrt(2.0) * std::exp(-traj.t[i]);
        if (expect < 1e-6) continue;
        CHECK(std::abs(traj.E_out[i]) == doctest::Approx(expect).epsilon(1e-7));
    }
    // Overlap with a decreasing exponential of tau = 1/4: 8x/(2x+1)^2.
    CHECK(overlap_efficiency(traj, target) ==
          doctest::Approx(8.0 * 0.25 / 2.25).epsilon(1e-8));
    // Everything is emitted.
    CHECK(traj.out_norm.back() == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("lossless trajectories conserve the excitation number") {
    std::mt19937 rng(42);
    // Atom-limited lossless with a random drive.
    auto d = knot_drive(rng, 0.0, 6.0, 0.8, 2);
    auto traj = simulate_retrieval(d, lossless_atom(1.0, 0.4),
                                   ModelTier::AtomLimitedLossless, 0.0, 6.0,
                                   1.0);
    for (double r : traj.conservation) CHECK(std::abs(r) < 1e-8);

    // Full model, lossless.
    MemoryParams pf = lossless_atom(1.0);
    auto traj2 =
        simulate_retrieval(d, pf, ModelTier::Full, 0.0, 6.0, 1.0);
    for (double r : traj2.conservation) CHECK(std::abs(r) < 1e-8);

    // Storage runs conserve with the incoming flux counted.
    const auto target = PulseShape::sech(1.0).truncate(-3.0, 3.0);
    auto ds = knot_drive(rng, -3.0, 3.0, 0.8, 1);
    const auto st = simulate_storage(ds, target, lossless_atom(1.0),
                                     ModelTier::AtomLimitedLossless);
    for (double r : st.traj.conservation) CHECK(std::abs(r) < 1e-8);
}

TEST_CASE("storage equals retrieval through the time-reversed drive") {
    std::mt19937 rng(1234);
    const auto target = PulseShape::sech(0.7).truncate(-2.8, 2.8);
    int checked = 0;
    for (int trial = 0; trial < 20; ++trial) {
        const double delta = (trial % 3 == 0) ? 0.0 : 0.5 * (trial % 5 - 2);
        const MemoryParams p = lossless_atom(1.0, delta);
        auto d = knot_drive(rng, -2.8, 2.8, 1.0, trial % 3);
        SimOptions opt;
        opt.target = &target;
        const auto traj = simulate_retrieval(
            d, p, ModelTier::AtomLimitedLossless, -2.8, 2.8, 1.0, opt);
        const double eta_r = overlap_efficiency(traj, target);
        const auto rev = time_reverse_drive(d, -2.8, 2.8);
        const auto st = simulate_storage(rev, target, p,
                                         ModelTier::AtomLimitedLossless);
        CHECK(st.eta_s == doctest::Approx(eta_r).epsilon(1e-8));
        ++checked;
    }
    CHECK(checked == 20);
}

TEST_CASE("time-reversal symmetry also holds in the full lossy model") {
    std::mt19937 rng(99);
    const auto target = PulseShape::gaussian(0.8).truncate(-3.0, 3.0);
    MemoryParams p;
    p.kappa_in = 8.0;
    p.kappa_loss = 1.0;
    p.g_sqrtN = 2.0;
    p.gamma = 0.3;
    p.delta = -0.7;
    for (int trial = 0; trial < 3; ++trial) {
        auto d = knot_drive(rng, -3.0, 3.0, 1.2, 1);
        SimOptions opt;
        opt.target = &target;
        const auto traj =
            simulate_retrieval(d, p, ModelTier::Full, -3.0, 3.0, 1.0, opt);
        const double eta_r = overlap_efficiency(traj, target);
        const auto st = simulate_storage(time_reverse_drive(d, -3.0, 3.0),
                                         target, p, ModelTier::Full);
        CHECK(st.eta_s == doctest::Approx(eta_r).epsilon(1e-8));
    }
}

TEST_CASE("double reversal is the identity, bitwise on samples") {
    std::mt19937 rng(5);
    // Dyadic sample grid: the mirror map t -> t1+t2-t is then exact.
    auto d = knot_drive(rng, 0.0, 8.0, 1.0, 2, 33);
    const auto dd = time_reverse_drive(time_reverse_drive(d, 0.0, 8.0), 0.0, 8.0);
    REQUIRE(dd.t.size() == d.t.size());
    for (std::size_t i = 0; i < d.t.size(); ++i) {
        CHECK(dd.t[i] == d.t[i]);
        CHECK(dd.omega[i] == d.omega[i]);
    }
    REQUIRE(dd.impulses.size() == d.impulses.size());
    for (std::size_t i = 0; i < d.impulses.size(); ++i) {
        CHECK(dd.impulses[i].t == d.impulses[i].t);
        CHECK(dd.impulses[i].area == d.impulses[i].area);
        CHECK(dd.impulses[i].phase == d.impulses[i].phase);
    }
}

TEST_CASE("constant real drives are reversal-invariant") {
    ControlDrive d;
    d.t1 = 0.0;
    d.t2 = 4.0;
    d.fn = [](double) { return cd(0.75); };
    const int n = 65;
    for (int i = 0; i < n; ++i) {
        d.t.push_back(4.0 * i / (n - 1));
        d.omega.push_back(0.75);
    }
    const auto rev = time_reverse_drive(d, 0.0, 4.0);
    for (int i = 0; i < n; ++i) {
        CHECK(rev.t[i] == doctest::Approx(d.t[i]).epsilon(1e-14));
        CHECK(rev.omega[i] == d.omega[i]);
    }
    CHECK(rev.fn(1.3) == d.fn(1.3));
}

TEST_CASE("an impulse at t1 mirrors to t2") {
    ControlDrive d;
    d.t1 = 0.0;
    d.t2 = 6.0;
    d.impulses.push_back({0.0, M_PI / 2.0, 0.3});
    const auto rev = time_reverse_drive(d, 0.0, 6.0);
    REQUIRE(rev.impulses.size() == 1);
    CHECK(rev.impulses[0].t == 6.0);
    CHECK(rev.impulses[0].phase == -0.3);
}

TEST_CASE("lossy/lossless ratio reproduces the cooperativity factor") {
    std::mt19937 rng(77);
    const auto target = PulseShape::sech(1.0).truncate(-4.0, 4.0);
    for (double C : {1.0, 10.0}) {
        for (double loss_ratio : {0.0, 1.0}) {
            // Common total rates: Gamma_tilde(lossy) = Gamma(lossless) = 1.
            MemoryParams lossy;
            lossy.kappa_in = 40.0;
            lossy.kappa_loss = loss_ratio * lossy.kappa_in;
            lossy.gamma = 1.0 / (1.0 + C);
            const double kappa = lossy.kappa_in + lossy.kappa_loss;
            lossy.g_sqrtN = std::sqrt(C * kappa * lossy.gamma);
            const auto dl = derived(lossy);
            REQUIRE(dl.Gamma_tilde == doctest::Approx(1.0).epsilon(1e-12));

            const MemoryParams ideal = lossless_atom(1.0);

            auto d = knot_drive(rng, -4.0, 4.0, 0.9, 1);
            SimOptions opt;
            opt.target = &target;
            const auto lt = simulate_retrieval(
                d, lossy, ModelTier::AtomLimited, -4.0, 4.0, 1.0, opt);
            const auto it = simulate_retrieval(
                d, ideal, ModelTier::AtomLimitedLossless, -4.0, 4.0, 1.0, opt);
            const double eta_lossy = overlap_efficiency(lt, target);
            const double eta_ideal = overlap_efficiency(it, target);
            const double factor =
                C / (1.0 + C) * lossy.kappa_in / kappa;
            CHECK(eta_lossy ==
                  doctest::Approx(factor * eta_ideal).epsilon(1e-6));

            // Emitted + dissipated + left behind accounts for everything
            // (kappa_loss = 0 case: the only loss channel is gamma).
            if (loss_ratio == 0.0) {
                const double left = std::norm(lt.S.back()) +
                                    std::norm(lt.P.back());
                const double pg = loss_probability(lt, lossy.gamma);
                CHECK(lt.out_norm.back() + pg + left ==
                      doctest::Approx(1.0).epsilon(1e-7));
            }
        }
    }
}

TEST_CASE("loss probability vanishes without free-space decay") {
    std::mt19937 rng(3);
    auto d = knot_drive(rng, 0.0, 5.0, 0.7, 0);
    const auto traj = simulate_retrieval(d, lossless_atom(1.0),
                                         ModelTier::AtomLimitedLossless, 0.0,
                                         5.0, 1.0);
    CHECK(loss_probability(traj, 0.0) == 0.0);
}

TEST_CASE("overlap efficiency trivial cases") {
    // Perfect mode match: fast readout against the matching exponential.
    ControlDrive d;
    d.t1 = 0.0;
    d.t2 = 25.0;
    d.fn = [](double) { return cd(0.0); };
    d.impulses.push_back({0.0, M_PI / 2.0, M_PI});
    const auto match = PulseShape::decreasing_exp(0.5);
    SimOptions opt;
    opt.target = &match;
    auto traj = simulate_retrieval(d, lossless_atom(1.0),
                                   ModelTier::AtomLimitedLossless, 0.0, 25.0,
                                   1.0, opt);
    CHECK(overlap_efficiency(traj, match) == doctest::Approx(1.0).epsilon(1e-8));

    // Orthogonal target: (1 - 2t) e^{-t} integrates to zero against e^{-t}.
    std::vector<double> t;
    std::vector<cd> v;
    for (int i = 0; i <= 2000; ++i) {
        const double x = 25.0 * i / 2000.0;
        t.push_back(x);
        v.push_back((1.0 - 2.0 * x) * std::exp(-x));
    }
    const auto ortho = PulseShape::tabulated(t, v, 0.5);
    CHECK(overlap_efficiency(traj, ortho) < 1e-6);
    // The sample-spline fallback agrees with the accumulated overlap.
    auto plain = simulate_retrieval(d, lossless_atom(1.0),
                                    ModelTier::AtomLimitedLossless, 0.0, 25.0,
                                    1.0);
    CHECK(overlap_efficiency(plain, match) == doctest::Approx(1.0).epsilon(1e-6));
}
