#pragma once

#include <cmath>
#include <cstddef>
#include <deque>
#include <functional>
#include <vector>

namespace cavmem {

struct LbfgsOptions {
    int history = 8;
    int max_iter = 500;
    double grad_tol = 1e-8;     // infinity norm of the gradient
    int max_linesearch = 30;
    double armijo = 1e-4;
    double step_shrink = 0.5;
};

struct LbfgsResult {
    double f = 0.0;
    int iterations = 0;
    bool converged = false;  // gradient criterion met (vs. stalled search)
};

// Limited-memory BFGS with backtracking Armijo line search. Gradients come
// from a separate (expensive) callback so the line search can stay
// value-only; curvature pairs with nonpositive y.s are skipped.
inline LbfgsResult lbfgs_minimize(
    const std::function<double(const std::vector<double>&)>& value,
    const std::function<double(const std::vector<double>&,
                               std::vector<double>&)>& value_and_grad,
    std::vector<double>& x, const LbfgsOptions& opt = {}) {
    const std::size_t n = x.size();
    std::deque<std::vector<double>> s_hist, y_hist;
    std::deque<double> rho_hist;

    std::vector<double> g(n), x_new(n), g_new(n), dir(n);
    LbfgsResult res;
    double f = value_and_grad(x, g);
    res.f = f;

    for (int iter = 0; iter < opt.max_iter; ++iter) {
        double gmax = 0.0;
        for (double v : g) gmax = std::max(gmax, std::abs(v));
        if (gmax < opt.grad_tol) {
            res.converged = true;
            res.iterations = iter;
            res.f = f;
            return res;
        }

        // Two-loop recursion for the search direction.
        dir = g;
        std::vector<double> alpha(s_hist.size());
        for (std::size_t k = s_hist.size(); k-- > 0;) {
            double sd = 0.0;
            for (std::size_t i = 0; i < n; ++i) sd += s_hist[k][i] * dir[i];
            alpha[k] = rho_hist[k] * sd;
            for (std::size_t i = 0; i < n; ++i)
                dir[i] -= alpha[k] * y_hist[k][i];
        }
        if (!s_hist.empty()) {
            double yy = 0.0, sy = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                yy += y_hist.back()[i] * y_hist.back()[i];
                sy += s_hist.back()[i] * y_hist.back()[i];
            }
            const double h0 = sy / yy;
            for (auto& v : dir) v *= h0;
        }
        for (std::size_t k = 0; k < s_hist.size(); ++k) {
            double yd = 0.0;
            for (std::size_t i = 0; i < n; ++i) yd += y_hist[k][i] * dir[i];
            const double beta = rho_hist[k] * yd;
            for (std::size_t i = 0; i < n; ++i)
                dir[i] += (alpha[k] - beta) * s_hist[k][i];
        }
        for (auto& v : dir) v = -v;

        double dg = 0.0;
        for (std::size_t i = 0; i < n; ++i) dg += dir[i] * g[i];
        if (dg >= 0.0) {
            // Not a descent direction (stale curvature): restart steepest.
            s_hist.clear();
            y_hist.clear();
            rho_hist.clear();
            dg = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                dir[i] = -g[i];
                dg -= g[i] * g[i];
            }
        }

        // Backtracking Armijo line search (value-only probes).
        double step = 1.0;
        double f_new = f;
        bool accepted = false;
        for (int ls = 0; ls < opt.max_linesearch; ++ls) {
            for (std::size_t i = 0; i < n; ++i)
                x_new[i] = x[i] + step * dir[i];
            f_new = value(x_new);
            if (std::isfinite(f_new) && f_new <= f + opt.armijo * step * dg) {
                accepted = true;
                break;
            }
            step *= opt.step_shrink;
        }
        res.iterations = iter + 1;
        if (!accepted) {
            res.f = f;  // stalled: keep the best iterate
            return res;
        }

        value_and_grad(x_new, g_new);
        double sy = 0.0, ss = 0.0, yy = 0.0;
        std::vector<double> s_vec(n), y_vec(n);
        for (std::size_t i = 0; i < n; ++i) {
            s_vec[i] = x_new[i] - x[i];
            y_vec[i] = g_new[i] - g[i];
            sy += s_vec[i] * y_vec[i];
            ss += s_vec[i] * s_vec[i];
            yy += y_vec[i] * y_vec[i];
        }
        if (sy > 1e-10 * std::sqrt(ss * yy)) {
            s_hist.push_back(std::move(s_vec));
            y_hist.push_back(std::move(y_vec));
            rho_hist.push_back(1.0 / sy);
            if ((int)s_hist.size() > opt.history) {
                s_hist.pop_front();
                y_hist.pop_front();
                rho_hist.pop_front();
            }
        }
        x.swap(x_new);
        g.swap(g_new);
        f = f_new;
        res.f = f;
    }
    return res;
}

}  // namespace cavmem
