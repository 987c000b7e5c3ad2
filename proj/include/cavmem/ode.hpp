#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace cavmem {

struct OdeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct OdeOptions {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double initial_step = 0.0;  // 0 -> span/100
    std::size_t max_steps = 4'000'000;
};

// Embedded Dormand-Prince 5(4) pair on a complex state vector.
// rhs(t, y, dydt); observer(t, y) is called at t0 and after every accepted
// step. The last RHS evaluation is reused across steps (FSAL).
template <class RHS, class Observer>
void integrate_rk45(RHS&& rhs, std::vector<std::complex<double>>& y, double t0,
                    double t1, const OdeOptions& opt, Observer&& observe) {
    using cd = std::complex<double>;
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5,
                            c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                            a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                            a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                            a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    // Error weights: 5th order minus embedded 4th order solution.
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695,
                            e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                            e6 = 22.0 / 525, e7 = -1.0 / 40;

    if (t1 <= t0) {
        observe(t0, y);
        return;
    }
    const std::size_t n = y.size();
    std::vector<cd> k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), yt(n), yn(n);

    double t = t0;
    double h = opt.initial_step > 0 ? opt.initial_step : (t1 - t0) / 100.0;
    const double h_min = (t1 - t0) * 1e-15;
    rhs(t, y, k1);
    observe(t, y);

    double prev_err = 1.0;
    for (std::size_t step = 0; step < opt.max_steps; ++step) {
        if (t >= t1) return;
        h = std::min(h, t1 - t);
        if (!(t + h > t)) return;  // remaining interval below resolution

        auto stage = [&](std::vector<cd>& out, auto&&... coeff_k) {
            for (std::size_t i = 0; i < n; ++i) {
                cd acc = 0.0;
                ((acc += coeff_k.first * coeff_k.second[i]), ...);
                out[i] = y[i] + h * acc;
            }
        };
        using P = std::pair<double, const std::vector<cd>&>;
        stage(yt, P{a21, k1});
        rhs(t + c2 * h, yt, k2);
        stage(yt, P{a31, k1}, P{a32, k2});
        rhs(t + c3 * h, yt, k3);
        stage(yt, P{a41, k1}, P{a42, k2}, P{a43, k3});
        rhs(t + c4 * h, yt, k4);
        stage(yt, P{a51, k1}, P{a52, k2}, P{a53, k3}, P{a54, k4});
        rhs(t + c5 * h, yt, k5);
        stage(yt, P{a61, k1}, P{a62, k2}, P{a63, k3}, P{a64, k4}, P{a65, k5});
        rhs(t + h, yt, k6);
        for (std::size_t i = 0; i < n; ++i)
            yn[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] +
                                b5 * k5[i] + b6 * k6[i]);
        rhs(t + h, yn, k7);

        double err = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const cd e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] +
                              e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
            const double sc =
                opt.abs_tol +
                opt.rel_tol * std::max(std::abs(y[i]), std::abs(yn[i]));
            err += std::norm(e / sc);
        }
        err = std::sqrt(err / double(n));

        if (err <= 1.0) {
            t += h;
            y.swap(yn);
            k1.swap(k7);  // FSAL
            observe(t, y);
            // PI controller (beta = 0.04) keeps the step sequence smooth.
            const double fac =
                0.9 * std::pow(std::max(err, 1e-10), -0.2 + 0.04) *
                std::pow(prev_err, 0.04);
            prev_err = std::max(err, 1e-10);
            h *= std::clamp(fac, 0.2, 6.0);
        } else {
            h *= std::clamp(0.9 * std::pow(err, -0.2), 0.1, 0.9);
            if (h < h_min)
                throw OdeError("step size collapsed at t = " + std::to_string(t));
        }
    }
    throw OdeError("step budget exhausted at t = " + std::to_string(t));
}

}  // namespace cavmem
