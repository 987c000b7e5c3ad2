#include "cavmem/asymptotics.hpp"

#include "cavmem/control.hpp"

#include <cmath>
#include <stdexcept>

namespace cavmem {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

std::string to_string(AsymptoteRegime regime) {
    switch (regime) {
        case AsymptoteRegime::BelowThreshold: return "below-threshold";
        case AsymptoteRegime::AtUnit: return "at-unit";
        case AsymptoteRegime::LargeTau: return "large-tau";
        case AsymptoteRegime::Truncation: return "truncation";
    }
    return "?";
}

std::optional<double> threshold_time(ShapeKind kind) {
    switch (kind) {
        case ShapeKind::DecreasingExp: return 0.5;
        case ShapeKind::Sech: return 2.0;
        case ShapeKind::Lorentzian: return 23.0 / 25.0;
        default: return std::nullopt;
    }
}

double dec_exp_exact_eta(double Gamma, double tau) {
    const double x = Gamma * tau;
    if (x >= 0.5) return 1.0;
    return 8.0 * x / ((2.0 * x + 1.0) * (2.0 * x + 1.0));
}

AsymptoteResult table1_inefficiency(ShapeKind kind, double Gamma, double tau) {
    if (!(Gamma > 0) || !(tau > 0))
        throw std::invalid_argument("table1_inefficiency: positive rates only");
    const double x = Gamma * tau;
    AsymptoteResult r{1.0, AsymptoteRegime::AtUnit, ""};
    auto clamp01 = [](double v) { return std::min(1.0, std::max(0.0, v)); };
    switch (kind) {
        case ShapeKind::DecreasingExp: {
            const double Ta = 0.5;
            if (x >= Ta) return r;
            r.regime = AsymptoteRegime::BelowThreshold;
            r.eta = clamp01(1.0 - (Ta - x) * (Ta - x));
            r.validity_note = "near-threshold expansion, tau -> Ta-";
            return r;
        }
        case ShapeKind::Sech: {
            const double Ta = 2.0;
            if (x >= Ta) return r;
            r.regime = AsymptoteRegime::BelowThreshold;
            r.eta = clamp01(1.0 - std::pow(Ta - x, 3.0) / 96.0);
            r.validity_note = "near-threshold expansion, tau -> Ta-";
            return r;
        }
        case ShapeKind::Lorentzian: {
            const double Ta = 23.0 / 25.0;
            if (x >= Ta) return r;
            r.regime = AsymptoteRegime::BelowThreshold;
            r.eta = clamp01(1.0 - 0.15 * std::pow(Ta - x, 2.5));
            r.validity_note =
                "near-threshold expansion; approached by the two-critical-"
                "time pipeline (the single-t_c efficiency is discontinuous "
                "at the threshold for this shape)";
            return r;
        }
        case ShapeKind::Gaussian: {
            r.regime = AsymptoteRegime::LargeTau;
            const double x2 = x * x, x4 = x2 * x2;
            r.eta = clamp01(1.0 - std::exp(1.0 - 9.0 / (16.0 * x4) -
                                           1.0 / (2.0 * x2) - x2) /
                                      (16.0 * std::sqrt(kPi) * x4 * x));
            r.validity_note = "large-tau expansion";
            return r;
        }
        case ShapeKind::IncreasingExp: {
            if (x <= 0.5 + 1e-12) {
                // The xi-form is singular at Gamma tau = 1/2; fall back to
                // the full optimization pipeline.
                r.regime = AsymptoteRegime::BelowThreshold;
                r.eta = optimize_c(PulseShape::increasing_exp(tau), Gamma).eta;
                r.validity_note = "pipeline value (xi-form invalid here)";
                return r;
            }
            const double xi = 1.0 / (2.0 * x - 1.0);
            r.regime = AsymptoteRegime::LargeTau;
            r.eta = clamp01(std::pow(4.0, -xi) *
                            std::pow((1.0 + xi) / (1.0 + 2.0 * xi),
                                     -1.0 - 2.0 * xi));
            r.validity_note = "exact for Gamma tau > 1/2";
            return r;
        }
        case ShapeKind::Tabulated:
            throw std::invalid_argument(
                "no closed-form asymptote for tabulated shapes");
    }
    return r;
}

double beta(int n) {
    switch (n) {
        case 0: return std::log(2.0) - 0.5;
        case 1: {
            const double e32 = std::exp(1.5);
            return 9.0 * (e32 - 4.0) / (16.0 * (e32 - 1.0));
        }
        case 2: {
            const double e52 = std::exp(2.5);
            return 625.0 * (16.0 - e52) / (128.0 * (3.0 * e52 + 2.0));
        }
        default:
            throw std::invalid_argument(
                "beta: only n in {0,1,2} has a tabulated closed form");
    }
}

double truncation_inefficiency(int n, double alpha_n, double Gamma,
                               double tau) {
    return alpha_n * alpha_n * beta(n) / std::pow(Gamma * tau, 2 * n + 1);
}

double truncation_tc(int n, double alpha_n, double Gamma, double tau,
                     double eta, double t2) {
    const double lead = (1.0 + 2.0 * n) / (2.0 * Gamma);
    const double correction = std::pow(tau, 2 * n + 1) * std::pow(Gamma, 2 * n) /
                              (alpha_n * alpha_n) * std::pow(4.0, n) *
                              (1.0 - eta) /
                              std::pow(2.0 * n + 1.0, 2 * n - 1);
    return t2 - lead - correction;
}

}  // namespace cavmem
