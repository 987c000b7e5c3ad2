#pragma once

#include <algorithm>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace cavmem {

// Cubic spline with not-a-knot end conditions (reproduces cubic polynomials
// exactly, which keeps endpoint derivative probes honest).
class CubicSpline {
public:
    CubicSpline() = default;

    CubicSpline(std::vector<double> x, std::vector<double> y)
        : x_(std::move(x)), y_(std::move(y)) {
        const std::size_t n = x_.size();
        if (n < 4 || y_.size() != n)
            throw std::invalid_argument("CubicSpline: need >= 4 samples");
        for (std::size_t i = 1; i < n; ++i)
            if (!(x_[i] > x_[i - 1]))
                throw std::invalid_argument("CubicSpline: abscissae must increase");
        build();
    }

    double operator()(double t) const {
        const std::size_t i = segment(t);
        const double d = t - x_[i];
        return y_[i] + d * (b_[i] + d * (c_[i] + d * d_[i]));
    }

    double derivative(double t) const {
        const std::size_t i = segment(t);
        const double d = t - x_[i];
        return b_[i] + d * (2.0 * c_[i] + 3.0 * d * d_[i]);
    }

    double front() const { return x_.front(); }
    double back() const { return x_.back(); }

private:
    std::size_t segment(double t) const {
        auto it = std::upper_bound(x_.begin(), x_.end(), t);
        std::size_t i = (it == x_.begin()) ? 0 : std::size_t(it - x_.begin()) - 1;
        return std::min(i, x_.size() - 2);
    }

    void build() {
        const std::size_t n = x_.size();
        std::vector<double> h(n - 1);
        for (std::size_t i = 0; i + 1 < n; ++i) h[i] = x_[i + 1] - x_[i];

        // Second derivatives m[i]. Not-a-knot expresses the boundary values
        // through the first interior ones,
        //   m0      = ((h0+h1) m1 - h0 m2) / h1,
        //   m_{n-1} = ((h_{n-3}+h_{n-2}) m_{n-2} - h_{n-2} m_{n-3}) / h_{n-3},
        // which are substituted into the standard continuity rows so that a
        // tridiagonal system in m[1..n-2] remains.
        const std::size_t ni = n - 2;  // interior unknowns
        std::vector<double> diag(ni), lower(ni), upper(ni), rhs(ni);
        for (std::size_t k = 0; k < ni; ++k) {
            const std::size_t i = k + 1;
            lower[k] = h[i - 1];
            diag[k] = 2.0 * (h[i - 1] + h[i]);
            upper[k] = h[i];
            rhs[k] = 6.0 * ((y_[i + 1] - y_[i]) / h[i] -
                            (y_[i] - y_[i - 1]) / h[i - 1]);
        }
        diag[0] += h[0] * (h[0] + h[1]) / h[1];
        upper[0] -= h[0] * h[0] / h[1];
        diag[ni - 1] += h[n - 2] * (h[n - 3] + h[n - 2]) / h[n - 3];
        lower[ni - 1] -= h[n - 2] * h[n - 2] / h[n - 3];

        std::vector<double> cp(ni), dp(ni);
        cp[0] = upper[0] / diag[0];
        dp[0] = rhs[0] / diag[0];
        for (std::size_t k = 1; k < ni; ++k) {
            const double denom = diag[k] - lower[k] * cp[k - 1];
            cp[k] = (k + 1 < ni) ? upper[k] / denom : 0.0;
            dp[k] = (rhs[k] - lower[k] * dp[k - 1]) / denom;
        }
        std::vector<double> m(n);
        m[n - 2] = dp[ni - 1];
        for (std::size_t k = ni - 1; k-- > 0;) m[k + 1] = dp[k] - cp[k] * m[k + 2];
        m[0] = ((h[0] + h[1]) * m[1] - h[0] * m[2]) / h[1];
        m[n - 1] =
            ((h[n - 3] + h[n - 2]) * m[n - 2] - h[n - 2] * m[n - 3]) / h[n - 3];

        b_.resize(n - 1);
        c_.resize(n - 1);
        d_.resize(n - 1);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            b_[i] = (y_[i + 1] - y_[i]) / h[i] - h[i] * (2.0 * m[i] + m[i + 1]) / 6.0;
            c_[i] = m[i] / 2.0;
            d_[i] = (m[i + 1] - m[i]) / (6.0 * h[i]);
        }
    }

    std::vector<double> x_, y_, b_, c_, d_;
};

class ComplexSpline {
public:
    ComplexSpline() = default;
    ComplexSpline(const std::vector<double>& x,
                  const std::vector<std::complex<double>>& y) {
        std::vector<double> re(y.size()), im(y.size());
        for (std::size_t i = 0; i < y.size(); ++i) {
            re[i] = y[i].real();
            im[i] = y[i].imag();
        }
        re_ = CubicSpline(x, std::move(re));
        im_ = CubicSpline(x, std::move(im));
    }

    std::complex<double> operator()(double t) const { return {re_(t), im_(t)}; }
    std::complex<double> derivative(double t) const {
        return {re_.derivative(t), im_.derivative(t)};
    }
    double front() const { return re_.front(); }
    double back() const { return re_.back(); }

private:
    CubicSpline re_, im_;
};

}  // namespace cavmem
