#pragma once

#include <deque>
#include <functional>

#include "nrssb/learn/dataset.hpp"

namespace nrssb::learn {

struct LbfgsOptions {
    int memory = 10;
    int max_iter = 200;
    double grad_tol = 1e-6;
    double armijo_c = 1e-4;
    double backtrack = 0.5;
    int max_line_search = 40;
};

struct LbfgsResult {
    Vector x;
    double value = 0.0;
    double grad_norm = 0.0;
    int iterations = 0;
    int line_search_failures = 0;
};

/// L-BFGS with two-loop recursion and Armijo backtracking. A failed line
/// search falls back to a small plain gradient step and bumps the counter.
inline LbfgsResult lbfgs_minimize(
    const std::function<double(const Vector&, Vector&)>& objective, Vector x0,
    const LbfgsOptions& opt = {}) {
    LbfgsResult res;
    Vector x = std::move(x0);
    Vector grad(x.size());
    double fx = objective(x, grad);

    std::deque<Vector> s_hist, y_hist;
    std::deque<double> rho_hist;

    for (int iter = 0; iter < opt.max_iter; ++iter) {
        res.grad_norm = grad.norm();
        if (res.grad_norm < opt.grad_tol) break;
        res.iterations = iter + 1;

        // two-loop recursion
        Vector q = grad;
        std::vector<double> alpha(s_hist.size());
        for (size_t i = s_hist.size(); i-- > 0;) {
            alpha[i] = rho_hist[i] * s_hist[i].dot(q);
            q -= alpha[i] * y_hist[i];
        }
        if (!s_hist.empty()) {
            const Vector& s = s_hist.back();
            const Vector& yv = y_hist.back();
            q *= s.dot(yv) / yv.dot(yv);
        }
        for (size_t i = 0; i < s_hist.size(); ++i) {
            const double beta = rho_hist[i] * y_hist[i].dot(q);
            q += (alpha[i] - beta) * s_hist[i];
        }
        Vector dir = -q;
        double dg = dir.dot(grad);
        if (dg >= 0.0) { // not a descent direction; reset to steepest descent
            dir = -grad;
            dg = -grad.squaredNorm();
        }

        // backtracking Armijo line search
        double t = 1.0;
        Vector x_new;
        Vector grad_new(x.size());
        double fx_new = fx;
        bool ok = false;
        for (int ls = 0; ls < opt.max_line_search; ++ls) {
            x_new = x + t * dir;
            fx_new = objective(x_new, grad_new);
            if (std::isfinite(fx_new) && fx_new <= fx + opt.armijo_c * t * dg) {
                ok = true;
                break;
            }
            t *= opt.backtrack;
        }
        if (!ok) {
            ++res.line_search_failures;
            const double step = 1.0 / std::max(1.0, res.grad_norm);
            x_new = x - step * grad;
            fx_new = objective(x_new, grad_new);
            if (!std::isfinite(fx_new)) break; // give up; return current point
        }

        Vector s = x_new - x;
        Vector yv = grad_new - grad;
        const double sy = s.dot(yv);
        if (sy > 1e-12) { // keep the inverse-Hessian estimate positive definite
            s_hist.push_back(std::move(s));
            y_hist.push_back(std::move(yv));
            rho_hist.push_back(1.0 / sy);
            if (static_cast<int>(s_hist.size()) > opt.memory) {
                s_hist.pop_front();
                y_hist.pop_front();
                rho_hist.pop_front();
            }
        }
        x = std::move(x_new);
        grad = grad_new;
        fx = fx_new;
    }

    res.x = std::move(x);
    res.value = fx;
    res.grad_norm = grad.norm();
    return res;
}

} // namespace nrssb::learn
