#pragma once

#include <cmath>

namespace vrnmf {

/// Iteration controls for the accelerated projected gradient solvers.
struct ApgOptions {
    int max_iters = 300;
    /// Stop once ||x_{k+1} - x_k|| <= rel_tol * ||x_{k+1}||.
    double rel_tol = 1e-8;
    /// Function-value adaptive restart. When on, every accepted iterate
    /// has an objective no larger than its predecessor.
    bool restart = true;
};

struct ApgReport {
    int iterations = 0;
    int restarts = 0;
    bool converged = false;
};

/// Nesterov-accelerated projected gradient with step 1/lipschitz.
///
/// Momentum follows t_{k+1} = (1 + sqrt(1 + 4 t_k^2)) / 2, t_0 = 1, and
/// beta_k = (t_k - 1) / t_{k+1}. With restart enabled, an extrapolated step
/// that raises the objective is discarded and replaced by a plain projected
/// gradient step from the current iterate, and the momentum is reset.
///
/// `x` is any Eigen dense expression type with value semantics; `grad(y, g)`
/// writes the gradient at y into g; `objective(y)` returns the value;
/// `project(y)` maps y onto the feasible set in place.
template <class T, class Grad, class Objective, class Project>
ApgReport apg_minimize(T& x, double lipschitz, Grad&& grad, Objective&& objective,
                       Project&& project, const ApgOptions& opts) {
    ApgReport report;
    if (!(lipschitz > 0.0) || !std::isfinite(lipschitz)) {
        report.converged = true;
        return report;
    }
    const double step = 1.0 / lipschitz;
    T previous = x;
    T y = x;
    T g = x;
    T candidate = x;
    double value = opts.restart ? objective(x) : 0.0;
    double t = 1.0;
    for (int k = 0; k < opts.max_iters; ++k) {
        ++report.iterations;
        double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
        const double beta = (t - 1.0) / t_next;
        if (beta > 0.0) {
            y = x + beta * (x - previous);
        } else {
            y = x;
        }
        grad(y, g);
        candidate = y - step * g;
        project(candidate);
        double candidate_value = 0.0;
        if (opts.restart) {
            candidate_value = objective(candidate);
            if (candidate_value > value) {
                if (beta > 0.0) {
                    ++report.restarts;
                    t_next = 1.0;
                    grad(x, g);
                    candidate = x - step * g;
                    project(candidate);
                    candidate_value = objective(candidate);
                }
                if (candidate_value > value) {
                    // A plain gradient step from x cannot decrease the
                    // objective any further (up to rounding): x is optimal.
                    report.converged = true;
                    return report;
                }
            }
        }
        const double change = (candidate - x).norm();
        previous = x;
        x = candidate;
        value = candidate_value;
        t = t_next;
        if (change <= opts.rel_tol * x.norm()) {
            report.converged = true;
            return report;
        }
    }
    return report;
}

}  // namespace vrnmf
