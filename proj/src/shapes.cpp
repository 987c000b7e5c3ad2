#include "cavmem/shapes.hpp"

#include "cavmem/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace cavmem {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPi = 3.14159265358979323846;

// Quadrature horizon for domains extending to infinity, in units of tau.
// The exponential-tailed families carry less than 1e-17 of their intensity
// beyond 40 tau. The Lorentzian intensity only decays like 1/t^4, so its
// window must reach 600 tau to push the neglected mass below 1e-9; its
// cumulative integrals are exact closed forms either way.
double horizon_mult(ShapeKind kind) {
    return kind == ShapeKind::Lorentzian ? 600.0 : 40.0;
}

// Finite-difference weights for the m-th derivative at x0 on given nodes
// (Fornberg, Math. Comp. 51, 1988).
std::vector<std::vector<double>> fd_weights(double x0,
                                            const std::vector<double>& x,
                                            int m) {
    const int n = int(x.size()) - 1;
    std::vector<std::vector<std::vector<double>>> d(
        n + 1, std::vector<std::vector<double>>(n + 1,
                                                std::vector<double>(m + 1, 0.0)));
    d[0][0][0] = 1.0;
    double c1 = 1.0;
    for (int i = 1; i <= n; ++i) {
        double c2 = 1.0;
        for (int j = 0; j < i; ++j) {
            const double c3 = x[i] - x[j];
            c2 *= c3;
            for (int k = 0; k <= std::min(i, m); ++k) {
                d[i][j][k] = ((x[i] - x0) * d[i - 1][j][k] -
                              (k > 0 ? k * d[i - 1][j][k - 1] : 0.0)) /
                             c3;
            }
        }
        for (int k = 0; k <= std::min(i, m); ++k) {
            d[i][i][k] = c1 / c2 *
                         ((k > 0 ? k * d[i - 1][i - 1][k - 1] : 0.0) -
                          (x[i - 1] - x0) * d[i - 1][i - 1][k]);
        }
        c1 = c2;
    }
    std::vector<std::vector<double>> w(m + 1, std::vector<double>(n + 1));
    for (int k = 0; k <= m; ++k)
        for (int j = 0; j <= n; ++j) w[k][j] = d[n][j][k];
    return w;
}

}  // namespace

std::string to_string(ShapeKind kind) {
    switch (kind) {
        case ShapeKind::DecreasingExp: return "dec-exp";
        case ShapeKind::IncreasingExp: return "inc-exp";
        case ShapeKind::Sech: return "sech";
        case ShapeKind::Lorentzian: return "lorentzian";
        case ShapeKind::Gaussian: return "gaussian";
        case ShapeKind::Tabulated: return "tabulated";
    }
    return "?";
}

std::optional<ShapeKind> shape_kind_from_string(const std::string& name) {
    if (name == "dec-exp" || name == "decreasing-exp") return ShapeKind::DecreasingExp;
    if (name == "inc-exp" || name == "increasing-exp") return ShapeKind::IncreasingExp;
    if (name == "sech") return ShapeKind::Sech;
    if (name == "lorentzian") return ShapeKind::Lorentzian;
    if (name == "gaussian") return ShapeKind::Gaussian;
    if (name == "tabulated") return ShapeKind::Tabulated;
    return std::nullopt;
}

std::complex<double> PulseShape::base_eval(double t) const {
    const double s = 1.0 / std::sqrt(tau_);
    switch (kind_) {
        case ShapeKind::DecreasingExp: return s * std::exp(-t / (2.0 * tau_));
        case ShapeKind::IncreasingExp: return s * std::exp(t / (2.0 * tau_));
        case ShapeKind::Sech: return s / std::cosh(2.0 * t / tau_);
        case ShapeKind::Lorentzian: {
            const double x = t / tau_;
            return std::sqrt(2.0 / (kPi * tau_)) / (1.0 + x * x);
        }
        case ShapeKind::Gaussian: {
            const double x = t / tau_;
            return s * std::pow(kPi, -0.25) * std::exp(-0.5 * x * x);
        }
        case ShapeKind::Tabulated: return (*spline_)(t);
    }
    return 0.0;
}

std::complex<double> PulseShape::base_derivative(double t) const {
    switch (kind_) {
        case ShapeKind::DecreasingExp: return base_eval(t) * (-1.0 / (2.0 * tau_));
        case ShapeKind::IncreasingExp: return base_eval(t) * (1.0 / (2.0 * tau_));
        case ShapeKind::Sech:
            return base_eval(t) * (-2.0 / tau_) * std::tanh(2.0 * t / tau_);
        case ShapeKind::Lorentzian: {
            const double x = t / tau_;
            return base_eval(t) * (-2.0 * x / (tau_ * (1.0 + x * x)));
        }
        case ShapeKind::Gaussian: return base_eval(t) * (-t / (tau_ * tau_));
        case ShapeKind::Tabulated: return spline_->derivative(t);
    }
    return 0.0;
}

std::complex<double> PulseShape::eval(double t) const {
    if (t < t1_ || t > t2_ || t < lo_ || t > hi_) return 0.0;
    return (base_eval(t) - offset_) / norm_;
}

std::complex<double> PulseShape::derivative(double t) const {
    if (t < t1_ || t > t2_ || t < lo_ || t > hi_) return 0.0;
    return base_derivative(t) / norm_;
}

void PulseShape::init_window() {
    const double h = horizon_mult(kind_) * tau_;
    lo_ = std::isinf(t1_) ? t2_ == kInf ? -h : t2_ - h : t1_;
    hi_ = std::isinf(t2_) ? t1_ == -kInf ? h : t1_ + h : t2_;
}

PulseShape PulseShape::decreasing_exp(double tau) {
    if (!(tau > 0)) throw std::invalid_argument("tau must be positive");
    PulseShape p;
    p.kind_ = ShapeKind::DecreasingExp;
    p.tau_ = tau;
    p.t1_ = 0.0;
    p.t2_ = kInf;
    p.init_window();
    return p;
}

PulseShape PulseShape::increasing_exp(double tau) {
    if (!(tau > 0)) throw std::invalid_argument("tau must be positive");
    PulseShape p;
    p.kind_ = ShapeKind::IncreasingExp;
    p.tau_ = tau;
    p.t1_ = -kInf;
    p.t2_ = 0.0;
    p.init_window();
    return p;
}

PulseShape PulseShape::sech(double tau) {
    if (!(tau > 0)) throw std::invalid_argument("tau must be positive");
    PulseShape p;
    p.kind_ = ShapeKind::Sech;
    p.tau_ = tau;
    p.t1_ = -kInf;
    p.t2_ = kInf;
    p.init_window();
    return p;
}

PulseShape PulseShape::lorentzian(double tau) {
    if (!(tau > 0)) throw std::invalid_argument("tau must be positive");
    PulseShape p;
    p.kind_ = ShapeKind::Lorentzian;
    p.tau_ = tau;
    p.t1_ = -kInf;
    p.t2_ = kInf;
    p.init_window();
    return p;
}

PulseShape PulseShape::gaussian(double tau) {
    if (!(tau > 0)) throw std::invalid_argument("tau must be positive");
    PulseShape p;
    p.kind_ = ShapeKind::Gaussian;
    p.tau_ = tau;
    p.t1_ = -kInf;
    p.t2_ = kInf;
    p.init_window();
    return p;
}

PulseShape PulseShape::tabulated(std::vector<double> t,
                                 std::vector<std::complex<double>> values,
                                 double tau) {
    PulseShape p;
    p.kind_ = ShapeKind::Tabulated;
    p.spline_ = std::make_shared<ComplexSpline>(t, values);
    p.t1_ = t.front();
    p.t2_ = t.back();
    p.lo_ = p.t1_;
    p.hi_ = p.t2_;
    p.tau_ = 1.0;
    const double total = integrate(
        [&](double x) { return std::norm(p.base_eval(x)); }, p.lo_, p.hi_,
        1e-14, 1e-13);
    if (!(total > 1e-30))
        throw std::invalid_argument("tabulated pulse has zero weight");
    p.norm_ = std::sqrt(total);
    p.tau_ = tau > 0 ? tau : p.time_variance();
    return p;
}

PulseShape PulseShape::from_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::vector<double> t;
    std::vector<std::complex<double>> v;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ss(line);
        double a, b, c = 0.0;
        if (!(ss >> a >> b)) continue;  // header or blank
        ss >> c;
        t.push_back(a);
        v.emplace_back(b, c);
    }
    if (t.size() < 4)
        throw std::runtime_error(path + ": need at least 4 samples");
    return tabulated(std::move(t), std::move(v));
}

double PulseShape::analytic_cum(double t) const {
    const double x = t / tau_;
    switch (kind_) {
        case ShapeKind::DecreasingExp: return t <= 0 ? 0.0 : -std::expm1(-x);
        case ShapeKind::IncreasingExp: return t >= 0 ? 1.0 : std::exp(x);
        case ShapeKind::Sech: return 1.0 / (1.0 + std::exp(-4.0 * x));
        case ShapeKind::Gaussian: return 0.5 * std::erfc(-x);
        case ShapeKind::Lorentzian:
            if (x < 0) return analytic_tail(-t);
            return 1.0 - analytic_tail(t);
        default: break;
    }
    throw std::logic_error("analytic_cum: unsupported kind");
}

double PulseShape::analytic_tail(double t) const {
    const double x = t / tau_;
    switch (kind_) {
        case ShapeKind::DecreasingExp: return t <= 0 ? 1.0 : std::exp(-x);
        case ShapeKind::IncreasingExp: return t >= 0 ? 0.0 : -std::expm1(x);
        case ShapeKind::Sech: return 1.0 / (1.0 + std::exp(4.0 * x));
        case ShapeKind::Gaussian: return 0.5 * std::erfc(x);
        case ShapeKind::Lorentzian:
            if (x < 0) return analytic_cum(-t);
            if (x == 0.0) return 0.5;
            return (std::atan(1.0 / x) - x / (1.0 + x * x)) / kPi;
        default: break;
    }
    throw std::logic_error("analytic_tail: unsupported kind");
}

double PulseShape::cum_intensity(double t) const {
    if (!truncated_ && kind_ != ShapeKind::Tabulated) {
        if (t <= t1_) return 0.0;
        if (t >= t2_) return 1.0;
        return analytic_cum(t);
    }
    if (t <= lo_) return 0.0;
    if (t >= hi_) return 1.0;
    return integrate([&](double x) { return intensity(x); }, lo_, t, 1e-13,
                     1e-12);
}

double PulseShape::tail_intensity(double t) const {
    if (!truncated_ && kind_ != ShapeKind::Tabulated) {
        if (t <= t1_) return 1.0;
        if (t >= t2_) return 0.0;
        return analytic_tail(t);
    }
    if (t <= lo_) return 1.0;
    if (t >= hi_) return 0.0;
    return integrate([&](double x) { return intensity(x); }, t, hi_, 1e-13,
                     1e-12);
}

double PulseShape::total_intensity() const {
    if (!truncated_ && kind_ != ShapeKind::Tabulated) return 1.0;
    return integrate([&](double x) { return intensity(x); }, lo_, hi_, 1e-13,
                     1e-12);
}

double PulseShape::time_variance() const {
    // Moments over |phi|^2. Infinite tails beyond the quadrature window are
    // folded in with the substitution u = tau/t, which maps any intensity
    // decaying at least like 1/t^4 onto a bounded integrand.
    auto moment = [&](int k) {
        double m = integrate(
            [&](double t) { return std::pow(t, k) * intensity(t); }, lo_, hi_,
            1e-13, 1e-12);
        auto tail = [&](double sign) {
            const double X = sign > 0 ? hi_ : -lo_;
            return integrate(
                [&](double u) {
                    if (u <= 0.0) return 0.0;
                    const double t = sign * tau_ / u;
                    const double jac = tau_ / (u * u);
                    return std::pow(t, k) * std::norm(base_eval(t)) * jac;
                },
                0.0, tau_ / X, 1e-13, 1e-12);
        };
        if (t2_ == kInf) m += tail(+1.0);
        if (t1_ == -kInf) m += tail(-1.0);
        return m;
    };
    const double m1 = moment(1);
    const double m2 = moment(2);
    return std::sqrt(std::max(0.0, m2 - m1 * m1));
}

PulseShape PulseShape::truncate(double a, double b, bool zero_onset) const {
    if (!(a < b)) throw std::invalid_argument("truncate: need t1 < t2");
    a = std::max(a, t1_);
    b = std::min(b, t2_);
    if (!(a < b)) throw std::invalid_argument("truncate: window outside domain");

    PulseShape p(*this);
    p.t1_ = a;
    p.t2_ = b;
    p.lo_ = a;
    p.hi_ = b;
    p.truncated_ = true;
    if (zero_onset) p.offset_ = base_eval(b);
    // Renormalize against the raw (offset-subtracted, un-normalized) form so
    // that re-truncating on the same window reproduces identical values.
    const double total = integrate(
        [&](double t) { return std::norm(base_eval(t) - p.offset_); }, a, b,
        1e-14, 1e-13);
    if (!(total > 1e-30))
        throw std::invalid_argument("truncate: zero pulse weight on window");
    p.norm_ = std::sqrt(total);
    return p;
}

PulseShape::Endpoint PulseShape::taylor_endpoint(int order_cap) const {
    if (std::isinf(t2_))
        throw std::invalid_argument("taylor_endpoint: t2 must be finite");
    const int m = order_cap;
    const double h = 1e-2 * tau_;
    const int nodes = m + 3;
    std::vector<double> x(nodes);
    std::vector<std::complex<double>> f(nodes);
    for (int j = 0; j < nodes; ++j) {
        x[j] = t2_ - j * h;
        f[j] = eval(x[j]);
    }
    const auto w = fd_weights(t2_, x, m);
    double ref = 0.0;
    for (int j = 0; j < nodes; ++j) ref = std::max(ref, std::abs(f[j]));
    ref = std::max(ref, 1.0 / std::sqrt(tau_));

    double factorial = 1.0;
    for (int k = 0; k <= m; ++k) {
        if (k > 0) factorial *= k;
        std::complex<double> d = 0.0;
        for (int j = 0; j < nodes; ++j) d += w[k][j] * f[j];
        const double alpha_mag =
            std::abs(d) * std::pow(tau_, k + 0.5) / factorial;
        // Threshold sits above the finite-difference noise floor of
        // spline-interpolated data.
        if (alpha_mag > 1e-6 * ref * std::sqrt(tau_)) {
            const double alpha =
                std::copysign(alpha_mag, d.real() != 0.0 ? d.real() : 1.0);
            return {k, alpha};
        }
    }
    throw std::runtime_error(
        "taylor_endpoint: derivatives vanish at t2 up to order cap");
}

}  // namespace cavmem
