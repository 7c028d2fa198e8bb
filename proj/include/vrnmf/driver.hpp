#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "vrnmf/apg.hpp"
#include "vrnmf/matrix_core.hpp"
#include "vrnmf/regularizers.hpp"

namespace vrnmf {

/// W (m x r, nonnegative) and H (r x n, columns in the unit simplex).
struct FactorPair {
    DenseMatrix w;
    DenseMatrix h;

    Eigen::Index rank() const { return w.cols(); }
};

struct SolverConfig {
    double lambda = 0.0;
    RegularizerKind kind = RegularizerKind::det();
    int outer_iters = 300;
    ApgOptions h_opts{};
    int w_inner_iters = 50;
    double w_rel_tol = 1e-8;
    /// Recorded in manifests; the solver itself draws no random numbers.
    std::uint64_t seed = 0;
    int trace_every = 1;
    /// Stop once |total_t - total_{t-1}| <= tol * |total_{t-1}|. Off by default.
    std::optional<double> early_exit_rel_change;
    /// Column-parallel H updates; 0 = VRNMF_THREADS / hardware.
    int threads = 1;

    void validate() const;
};

struct TracePoint {
    int iteration = 0;
    ObjectiveValue objective;
    double seconds = 0.0;
};

using ConvergenceTrace = std::vector<TracePoint>;

enum class RunStatus {
    Completed,      ///< ran all outer iterations
    Converged,      ///< optional early exit triggered
    RankDeficient,  ///< W lost rank (nuclear SVT); last full-rank iterate returned
};

std::string_view to_string(RunStatus status);

struct RunResult {
    FactorPair factors;
    ConvergenceTrace trace;
    RunStatus status = RunStatus::Completed;
    int iterations = 0;
    /// Regularizer with delta resolved (LogDet).
    RegularizerKind kind;
    std::vector<std::string> warnings;
};

struct SpaResult {
    DenseMatrix w0;
    std::vector<Eigen::Index> indices;
};

/// Successive projection algorithm on the raw columns of X. Ties in the
/// residual norm go to the lowest column index.
SpaResult spa_init(const DenseMatrix& x, Eigen::Index r);

/// W0 from SPA and H0 = solve_h(W0, X, 0).
FactorPair initialize(const DenseMatrix& x, Eigen::Index r, const ApgOptions& h_opts = {}, int threads = 1);

/// Alternating W/H updates from a given starting pair.
RunResult run_from(const DenseMatrix& x, const FactorPair& start, const SolverConfig& cfg);

/// SPA initialization followed by run_from.
RunResult run(const DenseMatrix& x, Eigen::Index r, const SolverConfig& cfg);

/// fit(W0, H0) / |V(W0)|, the factor turning a relative weight into lambda.
/// Throws DegeneracyError if V(W0) is zero.
double lambda_scale(const DenseMatrix& x, const FactorPair& start, const RegularizerKind& kind);

/// Resolve an unset LogDet delta from W0; other kinds pass through.
RegularizerKind resolve_kind(const RegularizerKind& kind, const DenseMatrix& w0);

struct OptimalityResiduals {
    /// ||W - [W - grad_W]_+||_F / ||XH^T||_F
    double w = 0.0;
    /// ||H - P(H - grad_H / L)||_F * L / ||W^T X||_F, column-wise simplex projection
    double h = 0.0;
};

/// Scaled projected-gradient residuals of the smooth objectives (Det and
/// LogDet; for LogDet the majorizer anchored at W has the same gradient).
OptimalityResiduals optimality_residuals(const DenseMatrix& x, const FactorPair& factors, double lambda,
                                         const RegularizerKind& kind);

}  // namespace vrnmf
