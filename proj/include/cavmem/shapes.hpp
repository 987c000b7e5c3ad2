#pragma once

#include "cavmem/spline.hpp"

#include <complex>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace cavmem {

enum class ShapeKind {
    DecreasingExp,
    IncreasingExp,
    Sech,
    Lorentzian,
    Gaussian,
    Tabulated,
};

std::string to_string(ShapeKind kind);
std::optional<ShapeKind> shape_kind_from_string(const std::string& name);

// Photon mode function phi(t), normalized to unit intensity over its domain
// and identically zero outside it. Infinite domain endpoints are kept as
// +-infinity; quadrature runs over a finite window [lo(), hi()] chosen so
// that the neglected tail mass is irrelevant (exact cumulative integrals of
// the analytic families are evaluated in closed form instead).
//
// Value semantics; immutable after construction and safe to share across
// threads.
class PulseShape {
public:
    PulseShape() = default;  // empty placeholder, zero everywhere

    static PulseShape decreasing_exp(double tau);  // exp(-t/2tau)/sqrt(tau) on [0,inf)
    static PulseShape increasing_exp(double tau);  // exp(t/2tau)/sqrt(tau) on (-inf,0]
    static PulseShape sech(double tau);            // sech(2t/tau)/sqrt(tau)
    static PulseShape lorentzian(double tau);      // sqrt(2/pi tau) tau^2/(tau^2+t^2)
    static PulseShape gaussian(double tau);        // pi^-1/4 exp(-t^2/2tau^2)/sqrt(tau)
    // User-supplied samples, cubic-spline interpolated and renormalized.
    static PulseShape tabulated(std::vector<double> t,
                                std::vector<std::complex<double>> values,
                                double tau = 0.0);
    // CSV with columns t, Re phi [, Im phi]; header line optional.
    static PulseShape from_csv(const std::string& path);

    ShapeKind kind() const { return kind_; }
    double tau() const { return tau_; }
    double t1() const { return t1_; }  // domain start, may be -inf
    double t2() const { return t2_; }  // domain end, may be +inf
    double lo() const { return lo_; }  // finite quadrature window
    double hi() const { return hi_; }
    double norm() const { return norm_; }
    std::complex<double> onset_offset() const { return offset_; }
    bool is_truncated() const { return truncated_; }

    std::complex<double> eval(double t) const;
    std::complex<double> derivative(double t) const;
    double intensity(double t) const { return std::norm(eval(t)); }

    // Integrals of |phi|^2 from t1 to t and from t to t2. Exact closed forms
    // for the untruncated analytic families, adaptive quadrature otherwise.
    double cum_intensity(double t) const;
    double tail_intensity(double t) const;
    double total_intensity() const;  // quadrature check, should be 1

    // T_c = sqrt(<t^2> - <t>^2) with moments over |phi|^2.
    double time_variance() const;

    // Restriction to [a,b], renormalized. With zero_onset the constant
    // phi(b) is subtracted before renormalizing so the pulse ends with a
    // linear zero (raises the endpoint Taylor order from n=0 to n=1).
    PulseShape truncate(double a, double b, bool zero_onset = false) const;

    // Structural identity (same family, parameters and window); used to
    // decide whether a cached overlap belongs to this shape.
    bool same_as(const PulseShape& other) const {
        return kind_ == other.kind_ && tau_ == other.tau_ &&
               t1_ == other.t1_ && t2_ == other.t2_ && norm_ == other.norm_ &&
               offset_ == other.offset_ && spline_ == other.spline_;
    }

    // Leading term of phi near t2: phi ~ alpha * tau^-1/2 ((t-t2)/tau)^n.
    struct Endpoint {
        int n;
        double alpha;
    };
    Endpoint taylor_endpoint(int order_cap = 4) const;

private:
    void init_window();
    std::complex<double> base_eval(double t) const;
    std::complex<double> base_derivative(double t) const;
    double analytic_cum(double t) const;   // untruncated families only
    double analytic_tail(double t) const;

    ShapeKind kind_ = ShapeKind::Sech;
    double tau_ = 1.0;
    double t1_ = 0.0, t2_ = 0.0;
    double lo_ = 0.0, hi_ = 0.0;
    double norm_ = 1.0;
    std::complex<double> offset_ = 0.0;
    bool truncated_ = false;
    std::shared_ptr<const ComplexSpline> spline_;
};

}  // namespace cavmem
