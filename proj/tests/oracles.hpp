#pragma once

// Test-side numerical oracles, deliberately independent of the library's
// quadrature and root-finding paths.

#include <cmath>
#include <complex>
#include <functional>

namespace oracles {

// Adaptive Simpson with Richardson correction.
inline double simpson_rec(const std::function<double(double)>& f, double a,
                          double b, double fa, double fm, double fb,
                          double whole, double eps, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double diff = left + right - whole;
    if (depth <= 0 || std::abs(diff) <= 15.0 * eps)
        return left + right + diff / 15.0;
    return simpson_rec(f, a, m, fa, flm, fm, left, eps / 2.0, depth - 1) +
           simpson_rec(f, m, b, fm, frm, fb, right, eps / 2.0, depth - 1);
}

// Pre-split into panels so localized bumps cannot be missed, then adapt.
inline double quad(const std::function<double(double)>& f, double a, double b,
                   double eps = 1e-13) {
    if (a == b) return 0.0;
    const int panels = 64;
    double total = 0.0;
    for (int i = 0; i < panels; ++i) {
        const double pa = a + (b - a) * i / panels;
        const double pb = a + (b - a) * (i + 1) / panels;
        const double fa = f(pa), fb = f(pb), fm = f(0.5 * (pa + pb));
        const double whole = (pb - pa) / 6.0 * (fa + 4.0 * fm + fb);
        total += simpson_rec(f, pa, pb, fa, fm, fb, whole, eps / panels, 42);
    }
    return total;
}

inline std::complex<double> quad_c(
    const std::function<std::complex<double>(double)>& f, double a, double b,
    double eps = 1e-13) {
    const double re = quad([&](double t) { return f(t).real(); }, a, b, eps);
    const double im = quad([&](double t) { return f(t).imag(); }, a, b, eps);
    return {re, im};
}

// Plain bisection root finder.
inline double root(const std::function<double(double)>& f, double a, double b,
                   double tol = 1e-13) {
    double fa = f(a);
    for (int i = 0; i < 200 && b - a > tol; ++i) {
        const double m = 0.5 * (a + b);
        const double fm = f(m);
        if ((fm > 0) == (fa > 0)) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    return 0.5 * (a + b);
}

}  // namespace oracles
