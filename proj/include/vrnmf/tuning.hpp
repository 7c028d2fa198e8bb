#pragma once

#include <functional>
#include <vector>

#include "vrnmf/driver.hpp"

namespace vrnmf {

/// Greedy bisection over the relative weight lambda~ in [lower, upper].
struct TuneOptions {
    double lower = 1e-6;
    double upper = 0.5;
    int max_rounds = 20;
    /// Stop once consecutive midpoint scores differ by at most this much.
    double improvement_tol = 1e-4;
};

struct TuneEvaluation {
    double lambda_tilde = 0.0;
    double mrsa = 0.0;
    bool failed = false;
};

struct TuneResult {
    double lambda_tilde = 0.0;
    double lambda = 0.0;
    double mrsa = 0.0;
    /// fit(W0, H0) / |V(W0)|; lambda = lambda_tilde * lambda_scale.
    double lambda_scale = 1.0;
    /// Every distinct lambda~ scored, in evaluation order.
    std::vector<TuneEvaluation> evaluations;
    int bisection_rounds = 0;
};

/// Scores a relative weight; may throw, in which case the point is scored 100.
using LambdaScorer = std::function<double(double)>;

/// Bisection protocol on an arbitrary scorer (lambda_scale = 1).
///
/// Evaluate the endpoints and midpoint c of [a, b]. Each round compares
/// score(a) + score(c) with score(c) + score(b) and keeps the half with the
/// smaller sum. On an exact draw both halves are bisected once and the half
/// whose new midpoint scores lower is kept. Rounds stop after max_rounds or
/// when successive midpoint scores change by at most improvement_tol. The
/// returned point is the best one ever scored. Each lambda~ is scored once.
TuneResult bisection_search(const LambdaScorer& score, const TuneOptions& opts = {});

/// Score `points` equally spaced values over [lower, upper] and keep the best.
TuneResult grid_search(const LambdaScorer& score, int points, const TuneOptions& opts = {});

/// Solver-backed scorer: lambda = lambda~ * lambda_scale, full run from the
/// shared SPA start, matched MRSA against w_true.
struct SolverScorer {
    const DenseMatrix& x;
    const DenseMatrix& w_true;
    FactorPair start;
    SolverConfig cfg;
    double lambda_scale = 1.0;

    SolverScorer(const DenseMatrix& x, const DenseMatrix& w_true, Eigen::Index r, const SolverConfig& cfg);
    double operator()(double lambda_tilde) const;
};

/// Supervised lambda tuning by bisection against known endmembers.
TuneResult tune_lambda(const DenseMatrix& x, const DenseMatrix& w_true, Eigen::Index r, const SolverConfig& cfg_base,
                       const TuneOptions& opts = {});

}  // namespace vrnmf
