#include "cavmem/oct.hpp"

#include "cavmem/lbfgs.hpp"
#include "cavmem/parallel.hpp"
#include "cavmem/spline.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace cavmem {

namespace {

using cd = std::complex<double>;
constexpr cd kI(0.0, 1.0);

// Fixed-grid RK4 storage propagator for the reduced atom-limited tiers.
// A deterministic time grid keeps the objective smooth in the knot values,
// which finite-difference gradients need; the grid is the union of a
// uniform subdivision and the control knots with midpoints, so strongly
// clustered knot layouts stay resolved.
class StorageObjective {
public:
    StorageObjective(const PulseShape& shape, const MemoryParams& params,
                     const ControlGrid& grid, const OctOptions& opt)
        : interp_(grid.interpolation), knots_(grid.knots) {
        const DerivedRates d = derived(params);
        switch (opt.tier) {
            case ModelTier::AtomLimitedLossless:
                if (params.gamma != 0.0 || params.kappa_loss != 0.0)
                    throw std::invalid_argument(
                        "oct: lossless tier needs gamma = kappa_loss = 0");
                decay_ = cd(d.Gamma, params.delta);
                in_coupling_ = std::sqrt(2.0 * d.Gamma);
                break;
            case ModelTier::AtomLimited: {
                const double pin = params.kappa_in / d.kappa;
                const double q =
                    d.C_infinite ? std::sqrt(pin)
                                 : std::sqrt(d.C / (1.0 + d.C) * pin);
                decay_ = cd(d.Gamma_tilde, params.delta);
                in_coupling_ = std::sqrt(2.0 * d.Gamma_tilde) * q;
                break;
            }
            default:
                throw std::invalid_argument(
                    "oct: only the reduced atom-limited tiers are supported");
        }

        const double t1 = knots_.front(), t2 = knots_.back();
        std::vector<double> edges;
        for (int i = 0; i <= opt.sim_steps; ++i)
            edges.push_back(t1 + (t2 - t1) * i / double(opt.sim_steps));
        for (std::size_t k = 0; k + 1 < knots_.size(); ++k) {
            edges.push_back(knots_[k]);
            edges.push_back(0.5 * (knots_[k] + knots_[k + 1]));
        }
        edges.push_back(t2);
        std::sort(edges.begin(), edges.end());
        edges.erase(std::unique(edges.begin(), edges.end(),
                                [&](double a, double b) {
                                    return b - a < 1e-13 * (t2 - t1);
                                }),
                    edges.end());
        steps_ = edges;

        // Omega is needed at step endpoints and midpoints; E_in likewise,
        // and it never changes across evaluations.
        node_times_.reserve(2 * steps_.size());
        for (std::size_t i = 0; i + 1 < steps_.size(); ++i) {
            node_times_.push_back(steps_[i]);
            node_times_.push_back(0.5 * (steps_[i] + steps_[i + 1]));
        }
        node_times_.push_back(steps_.back());
        e_in_nodes_.resize(node_times_.size());
        for (std::size_t i = 0; i < node_times_.size(); ++i)
            e_in_nodes_[i] = std::conj(shape.eval(t1 + t2 - node_times_[i]));
    }

    std::size_t n_knots() const { return knots_.size(); }

    // Storage efficiency |S(t2)|^2 for the given knot values.
    double eta(const std::vector<cd>& values) const {
        std::vector<cd> omega(node_times_.size());
        if (interp_ == GridInterp::Cubic) {
            const ComplexSpline sp(knots_, values);
            for (std::size_t i = 0; i < node_times_.size(); ++i)
                omega[i] = sp(node_times_[i]);
        } else {
            for (std::size_t i = 0; i < node_times_.size(); ++i)
                omega[i] = linear_at(values, node_times_[i]);
        }

        cd P = 0.0, S = 0.0;
        auto rhs = [&](cd p, cd s, cd w, cd ein, cd& dp, cd& ds) {
            dp = -decay_ * p + kI * w * s + kI * in_coupling_ * ein;
            ds = kI * std::conj(w) * p;
        };
        int stability_check = 0;
        for (std::size_t i = 0; i + 1 < steps_.size(); ++i) {
            if (++stability_check == 64) {
                stability_check = 0;
                // Fixed-step RK4 goes unstable for drives far above its
                // bandwidth; penalize instead of rewarding the blowup.
                const double load = std::norm(P) + std::norm(S);
                if (!(load < 16.0))
                    return -std::min(1e6, load);
            }
            const double h = steps_[i + 1] - steps_[i];
            const cd w0 = omega[2 * i], wm = omega[2 * i + 1],
                     w1 = omega[2 * i + 2];
            const cd e0 = e_in_nodes_[2 * i], em = e_in_nodes_[2 * i + 1],
                     e1 = e_in_nodes_[2 * i + 2];
            cd k1p, k1s, k2p, k2s, k3p, k3s, k4p, k4s;
            rhs(P, S, w0, e0, k1p, k1s);
            rhs(P + 0.5 * h * k1p, S + 0.5 * h * k1s, wm, em, k2p, k2s);
            rhs(P + 0.5 * h * k2p, S + 0.5 * h * k2s, wm, em, k3p, k3s);
            rhs(P + h * k3p, S + h * k3s, w1, e1, k4p, k4s);
            P += h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
            S += h / 6.0 * (k1s + 2.0 * k2s + 2.0 * k3s + k4s);
        }
        return std::norm(S);
    }

private:
    cd linear_at(const std::vector<cd>& values, double t) const {
        auto it = std::upper_bound(knots_.begin(), knots_.end(), t);
        std::size_t i = it == knots_.begin() ? 0 : (it - knots_.begin()) - 1;
        i = std::min(i, knots_.size() - 2);
        const double w = (t - knots_[i]) / (knots_[i + 1] - knots_[i]);
        return values[i] * (1.0 - w) + values[i + 1] * w;
    }

    GridInterp interp_;
    std::vector<double> knots_;
    cd decay_;
    double in_coupling_ = 0.0;
    std::vector<double> steps_;
    std::vector<double> node_times_;
    std::vector<cd> e_in_nodes_;
};

std::vector<cd> unpack(const std::vector<double>& x, bool real_only) {
    std::vector<cd> v(real_only ? x.size() : x.size() / 2);
    for (std::size_t i = 0; i < v.size(); ++i)
        v[i] = real_only ? cd(x[i], 0.0) : cd(x[2 * i], x[2 * i + 1]);
    return v;
}

}  // namespace

ControlGrid ControlGrid::make(double t1, double t2, int n, GridSpacing spacing,
                              GridInterp interp) {
    if (n < 4) throw std::invalid_argument("ControlGrid: need n >= 4 knots");
    if (!(t2 > t1)) throw std::invalid_argument("ControlGrid: need t1 < t2");
    ControlGrid g;
    g.interpolation = interp;
    g.spacing = spacing;
    g.knots.resize(n);
    g.values.assign(n, 0.0);
    if (spacing == GridSpacing::Uniform) {
        for (int i = 0; i < n; ++i)
            g.knots[i] = t1 + (t2 - t1) * i / double(n - 1);
    } else {
        // Uniform bulk with the last intervals shrinking geometrically
        // (ratio 0.9) into t2. Applying the ratio across *all* intervals
        // would compress the tail by ~10^7 and starve the bulk of knots.
        constexpr double r = 0.9;
        const int k = std::min(44, (n - 1) / 2);
        const int m = n - 1 - k;  // uniform intervals
        double units = m;
        for (int j = 1; j <= k; ++j) units += std::pow(r, j);
        const double w0 = (t2 - t1) / units;
        double t = t1;
        for (int j = 0; j + 1 < n; ++j) {
            g.knots[j] = t;
            t += j < m ? w0 : w0 * std::pow(r, j - m + 1);
        }
        g.knots[n - 1] = t2;
    }
    return g;
}

ControlDrive ControlGrid::to_drive() const {
    ControlDrive d;
    d.t1 = knots.front();
    d.t2 = knots.back();
    d.t = knots;
    d.omega = values;
    d.theta.assign(knots.size(), 0.0);
    if (interpolation == GridInterp::Cubic) {
        auto sp = std::make_shared<ComplexSpline>(knots, values);
        const double t1 = d.t1, t2 = d.t2;
        d.fn = [sp, t1, t2](double t) -> cd {
            if (t < t1 || t > t2) return 0.0;
            return (*sp)(t);
        };
        d.fn_dot = [sp, t1, t2](double t) -> cd {
            if (t < t1 || t > t2) return 0.0;
            return sp->derivative(t);
        };
    }
    // Linear grids rely on ControlDrive's sample interpolation.
    return d;
}

double oct_storage_eta(const PulseShape& shape, const MemoryParams& params,
                       const ControlGrid& grid, const OctOptions& opt) {
    return StorageObjective(shape, params, grid, opt).eta(grid.values);
}

OctResult oct_optimize(const PulseShape& shape, const MemoryParams& params,
                       ControlGrid grid, const ControlDrive* seed_drive,
                       const OctOptions& opt) {
    const StorageObjective objective(shape, params, grid, opt);
    const std::size_t nk = objective.n_knots();
    const std::size_t dim = opt.real_only ? nk : 2 * nk;
    const double rate_scale = derived(params).Gamma_tilde;

    // Precondition by knot leverage: a knot on a narrow interval moves the
    // objective much less per unit amplitude than one on a wide interval,
    // which cripples quasi-Newton steps on strongly clustered grids. The
    // optimizer therefore works in u_i = sqrt(lambda_i) * Omega_i with
    // lambda_i the trapezoid weight of knot i (identity on uniform grids).
    std::vector<double> scale(nk);
    {
        double mean = 0.0;
        for (std::size_t i = 0; i < nk; ++i) {
            const double left = i > 0 ? grid.knots[i] - grid.knots[i - 1] : 0.0;
            const double right =
                i + 1 < nk ? grid.knots[i + 1] - grid.knots[i] : 0.0;
            scale[i] = 0.5 * (left + right);
            mean += scale[i];
        }
        mean /= double(nk);
        for (auto& v : scale) v = std::sqrt(v / mean);
    }
    auto knot_scale = [&](std::size_t i) {
        return scale[opt.real_only ? i : i / 2];
    };
    auto to_values = [&](const std::vector<double>& u) {
        std::vector<double> x(u.size());
        for (std::size_t i = 0; i < u.size(); ++i) x[i] = u[i] / knot_scale(i);
        return unpack(x, opt.real_only);
    };

    auto f_of_u = [&](const std::vector<double>& u) {
        return -objective.eta(to_values(u));
    };
    auto grad_of_u = [&](const std::vector<double>& u,
                         std::vector<double>& g) {
        g.resize(dim);
        parallel_for(
            dim,
            [&](std::size_t i) {
                const double h =
                    opt.fd_step *
                    (std::abs(u[i]) + 0.1 * rate_scale * knot_scale(i));
                std::vector<double> up = u, um = u;
                up[i] += h;
                um[i] -= h;
                g[i] = (f_of_u(up) - f_of_u(um)) / (2.0 * h);
            },
            opt.jobs);
        return f_of_u(u);
    };

    std::vector<std::vector<double>> starts;
    if (seed_drive) {
        std::vector<double> u(dim, 0.0);
        for (std::size_t i = 0; i < nk; ++i) {
            const cd w = seed_drive->at(grid.knots[i]);
            if (opt.real_only)
                u[i] = w.real() * scale[i];
            else {
                u[2 * i] = w.real() * scale[i];
                u[2 * i + 1] = w.imag() * scale[i];
            }
        }
        starts.push_back(std::move(u));
    } else {
        starts.emplace_back(dim, 0.0);
        for (int r = 0; r < opt.restarts; ++r) {
            std::mt19937_64 rng(opt.seed + 0x9e3779b9ULL * (r + 1));
            std::normal_distribution<double> dist(0.0, rate_scale);
            std::vector<double> u(dim);
            for (std::size_t i = 0; i < dim; ++i)
                u[i] = dist(rng) * knot_scale(i);
            starts.push_back(std::move(u));
        }
    }

    LbfgsOptions lopt;
    lopt.max_iter = opt.max_iter;
    lopt.grad_tol = opt.grad_tol;

    OctResult best;
    best.grid = grid;
    best.eta = -1.0;
    for (auto& u : starts) {
        const auto res = lbfgs_minimize(f_of_u, grad_of_u, u, lopt);
        if (-res.f > best.eta) {
            best.eta = -res.f;
            best.iterations = res.iterations;
            best.converged = res.converged;
            best.grid.values = to_values(u);
        }
    }
    if (!std::isfinite(best.eta))
        throw std::runtime_error("oct: objective became non-finite");
    return best;
}

}  // namespace cavmem
