#include "cavmem/model.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace cavmem {

DerivedRates derived(const MemoryParams& p) {
    if (!(p.kappa_in > 0))
        throw std::invalid_argument("kappa_in must be positive (no input port)");
    if (p.kappa_loss < 0 || p.gamma < 0 || p.g_sqrtN < 0)
        throw std::invalid_argument("rates must be nonnegative");
    DerivedRates d{};
    d.kappa = p.kappa_in + p.kappa_loss;
    const double g2N = p.g_sqrtN * p.g_sqrtN;
    d.Gamma = g2N / p.kappa_in;
    d.Gamma_tilde = p.gamma + g2N / d.kappa;
    d.C_infinite = p.gamma == 0.0;
    d.C = d.C_infinite ? std::numeric_limits<double>::infinity()
                       : g2N / (d.kappa * p.gamma);
    return d;
}

RegimeReport regime_check(const MemoryParams& p, double t_char,
                          double threshold) {
    if (!(t_char > 0))
        throw std::invalid_argument("t_char must be positive");
    const DerivedRates d = derived(p);
    RegimeReport r{};
    r.atom_limited = d.kappa * t_char;
    r.cavity_limited = d.Gamma * t_char;
    r.adiabatic = r.atom_limited >= threshold && r.cavity_limited >= threshold;
    return r;
}

double loss_rescale(double eta0, const MemoryParams& p) {
    const DerivedRates d = derived(p);
    const double port = p.kappa_in / d.kappa;
    if (d.C_infinite) return port * eta0;
    return d.C / (1.0 + d.C) * port * eta0;
}

MemoryParams load_params(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    MemoryParams p{};
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        std::string key = line.substr(0, eq);
        key.erase(0, key.find_first_not_of(" \t"));
        key.erase(key.find_last_not_of(" \t") + 1);
        const double value = std::stod(line.substr(eq + 1));
        if (key == "g_sqrtN") p.g_sqrtN = value;
        else if (key == "kappa_in") p.kappa_in = value;
        else if (key == "kappa_loss") p.kappa_loss = value;
        else if (key == "gamma") p.gamma = value;
        else if (key == "delta") p.delta = value;
        else throw std::runtime_error("unknown parameter key: " + key);
    }
    return p;
}

void save_params(const MemoryParams& p, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out.precision(17);
    out << "# memory parameters, rates in 1/us\n";
    out << "g_sqrtN = " << p.g_sqrtN << "\n";
    out << "kappa_in = " << p.kappa_in << "\n";
    out << "kappa_loss = " << p.kappa_loss << "\n";
    out << "gamma = " << p.gamma << "\n";
    out << "delta = " << p.delta << "\n";
}

}  // namespace cavmem
