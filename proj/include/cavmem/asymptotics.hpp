#pragma once

#include "cavmem/shapes.hpp"

#include <optional>
#include <string>

namespace cavmem {

enum class AsymptoteRegime { BelowThreshold, AtUnit, LargeTau, Truncation };

struct AsymptoteResult {
    double eta;
    AsymptoteRegime regime;
    std::string validity_note;
};

std::string to_string(AsymptoteRegime regime);

// Threshold time T_a in units of 1/Gamma above which the pulse family
// reaches unit efficiency; families decaying faster than exponentially
// have none.
std::optional<double> threshold_time(ShapeKind kind);

// Closed-form inefficiency of the untruncated families: near-threshold
// expansions where a threshold exists, large-tau forms otherwise. The
// increasing-exponential expression is exact for Gamma*tau > 1/2; below
// that the full pipeline supplies eta.
AsymptoteResult table1_inefficiency(ShapeKind kind, double Gamma, double tau);

// eta = 8 Gamma tau/(2 Gamma tau + 1)^2 below threshold, 1 above (the
// decreasing exponential solves in closed form at every tau).
double dec_exp_exact_eta(double Gamma, double tau);

// Coefficients of the truncated-pulse expansion, n in {0, 1, 2}.
double beta(int n);

// 1 - eta = |alpha_n|^2 beta_n / (Gamma tau)^(2n+1).
double truncation_inefficiency(int n, double alpha_n, double Gamma, double tau);

// Critical-time estimate for a pulse truncated at t2.
double truncation_tc(int n, double alpha_n, double Gamma, double tau,
                     double eta, double t2 = 0.0);

}  // namespace cavmem
