#pragma once

#include <cmath>
#include <stdexcept>

namespace cavmem {

// Bisection on a bracketing interval [a,b] with f(a) and f(b) of opposite
// sign (or zero). Returns the midpoint once the bracket width drops below
// x_tol. The root returned is the left-most crossing inside the bracket in
// the sense that ties at a plateau resolve toward a.
template <class F>
double bisect(F&& f, double a, double b, double fa, double fb,
              double x_tol, int max_iter = 200) {
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if ((fa > 0.0) == (fb > 0.0))
        throw std::invalid_argument("bisect: endpoints do not bracket a root");
    for (int i = 0; i < max_iter && (b - a) > x_tol; ++i) {
        const double m = 0.5 * (a + b);
        const double fm = f(m);
        if (fm == 0.0) return m;
        if ((fm > 0.0) == (fa > 0.0)) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    return 0.5 * (a + b);
}

template <class F>
double bisect(F&& f, double a, double b, double x_tol, int max_iter = 200) {
    return bisect(f, a, b, f(a), f(b), x_tol, max_iter);
}

}  // namespace cavmem
