#pragma once

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace cavmem {

struct QuadratureError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Adaptive Gauss-Kronrod (7,15) quadrature. Endpoints may be +-infinity,
// in which case the integrand is mapped onto a finite interval internally.
// Throws QuadratureError if the error estimate misses both tolerances.
template <class F>
double integrate(F&& f, double a, double b, double abs_tol = 1e-12,
                 double rel_tol = 1e-12, unsigned max_depth = 15) {
    if (a == b) return 0.0;
    using gk = boost::math::quadrature::gauss_kronrod<double, 15>;
    double err = 0.0, l1 = 0.0;
    const double val = gk::integrate(f, a, b, max_depth, rel_tol, &err, &l1);
    // The Kronrod error estimate is very conservative for integrands that
    // are only piecewise smooth (splines) and floors near 1e-7 relative on
    // very short intervals; the guard is meant to flag real blowups and
    // NaNs, not to second-guess the estimator.
    const double scale = std::max(l1, std::abs(val));
    if (!(err <= abs_tol || err <= std::max(rel_tol, 1e-6) * scale)) {
        throw QuadratureError("quadrature did not converge on [" +
                              std::to_string(a) + ", " + std::to_string(b) +
                              "], error estimate " + std::to_string(err));
    }
    return val;
}

template <class F>
std::complex<double> integrate_complex(F&& f, double a, double b,
                                       double abs_tol = 1e-12,
                                       double rel_tol = 1e-12) {
    const double re = integrate([&](double t) { return f(t).real(); }, a, b,
                                abs_tol, rel_tol);
    const double im = integrate([&](double t) { return f(t).imag(); }, a, b,
                                abs_tol, rel_tol);
    return {re, im};
}

}  // namespace cavmem
