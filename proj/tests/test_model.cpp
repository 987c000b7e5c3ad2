#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "cavmem/model.hpp"

#include <cmath>
#include <cstdio>
#include <random>

using namespace cavmem;

TEST_CASE("derived rates") {
    MemoryParams p{1.0, 2.0, 0.0, 0.0, 0.0};
    auto d = derived(p);
    CHECK(d.Gamma == doctest::Approx(0.5));
    CHECK(d.C_infinite);
    CHECK(d.kappa == doctest::Approx(2.0));

    p = {1.0, 1.0, 0.0, 1.0, 0.0};
    d = derived(p);
    CHECK_FALSE(d.C_infinite);
    CHECK(d.C == doctest::Approx(1.0));
    CHECK(d.Gamma_tilde == doctest::Approx(2.0));

    CHECK_THROWS_AS(derived(MemoryParams{1.0, 0.0, 0.0, 0.0, 0.0}),
                    std::invalid_argument);
}

TEST_CASE("Gamma_tilde identity holds for arbitrary parameters") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(0.01, 5.0);
    for (int i = 0; i < 200; ++i) {
        MemoryParams p{u(rng), u(rng), u(rng), u(rng), 0.0};
        const auto d = derived(p);
        CHECK(d.Gamma_tilde ==
              doctest::Approx(p.gamma + d.Gamma * p.kappa_in / d.kappa)
                  .epsilon(1e-14));
    }
}

TEST_CASE("regime scores") {
    // kappa t = 100, Gamma t = 0.5: atom-limited but not adiabatic.
    MemoryParams p{std::sqrt(0.5 * 100.0), 100.0, 0.0, 0.0, 0.0};
    auto r = regime_check(p, 1.0);
    CHECK(r.atom_limited == doctest::Approx(100.0));
    CHECK(r.cavity_limited == doctest::Approx(0.5));
    CHECK_FALSE(r.adiabatic);

    p = {100.0, 100.0, 0.0, 0.0, 0.0};  // Gamma t = 100 too
    CHECK(regime_check(p, 1.0).adiabatic);

    p = {std::sqrt(36.0), 6.0, 0.0, 0.0, 0.0};  // kappa t = Gamma t = 6
    CHECK_FALSE(regime_check(p, 1.0).adiabatic);
    CHECK(regime_check(p, 1.0, 5.0).adiabatic);
}

TEST_CASE("loss rescale reference values") {
    CHECK(loss_rescale(1.0, {1.0, 1.0, 0.0, 0.0, 0.0}) == doctest::Approx(1.0));
    // C = 1, no cavity loss: eta = eta0 / 2.
    CHECK(loss_rescale(1.0, {1.0, 1.0, 0.0, 1.0, 0.0}) == doctest::Approx(0.5));
    // eta0 = 0.8, C = 4, kappa_in = kappa_loss: 0.8 * 4/5 * 1/2.
    MemoryParams p{};
    p.kappa_in = 1.0;
    p.kappa_loss = 1.0;
    p.gamma = 1.0;
    p.g_sqrtN = std::sqrt(4.0 * 2.0 * 1.0);  // C = g^2N/(kappa gamma) = 4
    CHECK(loss_rescale(0.8, p) == doctest::Approx(0.32).epsilon(1e-12));
}

TEST_CASE("loss rescale is monotone in C and the port ratio, linear in eta0") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(0.05, 4.0);
    for (int i = 0; i < 100; ++i) {
        MemoryParams p{u(rng), u(rng), u(rng), u(rng), 0.0};
        const double e = loss_rescale(1.0, p);
        // linearity
        CHECK(loss_rescale(0.37, p) == doctest::Approx(0.37 * e).epsilon(1e-13));
        // increasing C by raising g
        MemoryParams p2 = p;
        p2.g_sqrtN *= 1.3;
        CHECK(loss_rescale(1.0, p2) >= e - 1e-14);
        // improving the port ratio by reducing the loss rate
        MemoryParams p3 = p;
        p3.kappa_loss *= 0.5;
        CHECK(loss_rescale(1.0, p3) >= e - 1e-14);
    }
}

TEST_CASE("parameter file round trip") {
    MemoryParams p{2.5, 1.5, 0.25, 0.125, -0.5};
    const char* path = "test_params_roundtrip.txt";
    save_params(p, path);
    const auto q = load_params(path);
    std::remove(path);
    CHECK(q.g_sqrtN == p.g_sqrtN);
    CHECK(q.kappa_in == p.kappa_in);
    CHECK(q.kappa_loss == p.kappa_loss);
    CHECK(q.gamma == p.gamma);
    CHECK(q.delta == p.delta);
}
