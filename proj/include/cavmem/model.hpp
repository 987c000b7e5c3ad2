#pragma once

#include <string>

namespace cavmem {

// Physical rates of the cavity memory. g and N only ever enter as the
// collective coupling g*sqrt(N), so that product is stored as one field.
// Units are inverse time (1/us by convention in parameter files).
struct MemoryParams {
    double g_sqrtN = 1.0;
    double kappa_in = 1.0;
    double kappa_loss = 0.0;
    double gamma = 0.0;
    double delta = 0.0;
};

struct DerivedRates {
    double kappa;        // kappa_in + kappa_loss
    double Gamma;        // g^2 N / kappa_in, effective radiative linewidth
    double Gamma_tilde;  // gamma + g^2 N / kappa, total atomic decay rate
    double C;            // g^2 N / (kappa gamma); ignored if infinite
    bool C_infinite;     // gamma == 0
};

DerivedRates derived(const MemoryParams& p);

struct RegimeReport {
    double atom_limited;    // kappa * t_char
    double cavity_limited;  // Gamma * t_char
    bool adiabatic;         // both above threshold
};

RegimeReport regime_check(const MemoryParams& p, double t_char,
                          double threshold = 10.0);

// Lossless -> lossy efficiency map eta = [C/(1+C)] (kappa_in/kappa) eta0.
double loss_rescale(double eta0, const MemoryParams& p);

MemoryParams load_params(const std::string& path);
void save_params(const MemoryParams& p, const std::string& path);

}  // namespace cavmem
