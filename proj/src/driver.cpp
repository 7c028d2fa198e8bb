#include "vrnmf/driver.hpp"

#include <chrono>
#include <cmath>
#include <string>

#include "vrnmf/parallel.hpp"
#include "vrnmf/solver_h.hpp"
#include "vrnmf/solver_w.hpp"

namespace vrnmf {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

bool numerically_rank_deficient(const DenseMatrix& w) {
    if (w.cols() == 0) return false;
    const Vector sigma = Eigen::JacobiSVD<DenseMatrix>(w).singularValues();
    const double largest = sigma[0];
    return !(largest > 0.0) || sigma[sigma.size() - 1] <= 1e-10 * largest;
}

}  // namespace

void SolverConfig::validate() const {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
        throw ContractError("SolverConfig: lambda must be finite and nonnegative");
    }
    if (outer_iters < 1 || w_inner_iters < 1 || trace_every < 1) {
        throw ContractError("SolverConfig: outer_iters, w_inner_iters and trace_every must be >= 1");
    }
    if (h_opts.max_iters < 1 || !(h_opts.rel_tol > 0.0) || !(w_rel_tol > 0.0)) {
        throw ContractError("SolverConfig: invalid inner tolerances");
    }
    if (early_exit_rel_change && !(*early_exit_rel_change > 0.0)) {
        throw ContractError("SolverConfig: early exit tolerance must be positive");
    }
    kind.validate();
}

std::string_view to_string(RunStatus status) {
    switch (status) {
        case RunStatus::Completed:
            return "completed";
        case RunStatus::Converged:
            return "converged";
        case RunStatus::RankDeficient:
            return "rank_deficient";
    }
    return "unknown";
}

SpaResult spa_init(const DenseMatrix& x, Eigen::Index r) {
    const Eigen::Index m = x.rows();
    const Eigen::Index n = x.cols();
    if (r < 1 || r > std::min(m, n)) {
        throw DimensionError("spa_init: need 1 <= r <= min(m, n)");
    }
    require_finite(x, "spa_init");
    DenseMatrix residual = x;
    Vector norms = residual.colwise().squaredNorm().transpose();
    const double initial = norms.maxCoeff();
    SpaResult result;
    result.indices.reserve(static_cast<std::size_t>(r));
    for (Eigen::Index k = 0; k < r; ++k) {
        Eigen::Index best = 0;
        for (Eigen::Index j = 1; j < n; ++j) {
            if (norms[j] > norms[best]) best = j;
        }
        if (!(norms[best] > 1e-24 * initial) || !(initial > 0.0)) {
            throw DegeneracyError("spa_init: residual vanished after " + std::to_string(k) + " of " +
                                  std::to_string(r) + " picks; X has rank < r");
        }
        result.indices.push_back(best);
        const Vector u = residual.col(best) / std::sqrt(norms[best]);
        const Eigen::RowVectorXd coeffs = u.transpose() * residual;
        residual.noalias() -= u * coeffs;
        norms = residual.colwise().squaredNorm().transpose();
    }
    result.w0.resize(m, r);
    for (Eigen::Index k = 0; k < r; ++k) {
        result.w0.col(k) = x.col(result.indices[static_cast<std::size_t>(k)]);
    }
    return result;
}

FactorPair initialize(const DenseMatrix& x, Eigen::Index r, const ApgOptions& h_opts, int threads) {
    FactorPair start;
    start.w = spa_init(x, r).w0;
    start.h = solve_h(start.w, x, DenseMatrix::Zero(r, x.cols()), h_opts, resolve_threads(threads));
    return start;
}

RegularizerKind resolve_kind(const RegularizerKind& kind, const DenseMatrix& w0) {
    RegularizerKind resolved = kind;
    if (resolved.tag == RegularizerTag::LogDet && !resolved.delta) {
        resolved.delta = default_logdet_delta(w0);
    }
    return resolved;
}

double lambda_scale(const DenseMatrix& x, const FactorPair& start, const RegularizerKind& kind) {
    const RegularizerKind resolved = resolve_kind(kind, start.w);
    const ObjectiveValue value = eval_objective(x, start.w, start.h, 0.0, resolved);
    if (!(std::abs(value.volume) > 0.0)) {
        throw DegeneracyError("lambda_scale: V(W0) is zero");
    }
    return value.fit / std::abs(value.volume);
}

RunResult run_from(const DenseMatrix& x, const FactorPair& start, const SolverConfig& cfg) {
    cfg.validate();
    const Eigen::Index r = start.w.cols();
    if (start.w.rows() != x.rows() || start.h.rows() != r || start.h.cols() != x.cols()) {
        throw DimensionError("run: starting factors do not conform to X");
    }
    require_finite(x, "run X");
    const auto t0 = Clock::now();
    const int threads = resolve_threads(cfg.threads);

    RunResult result;
    result.kind = resolve_kind(cfg.kind, start.w);
    FactorPair current{start.w.cwiseMax(0.0), start.h};
    const double x_norm_sq = x.squaredNorm();

    WUpdateContext ctx;
    ctx.lambda = cfg.lambda;
    ctx.kind = result.kind;
    ctx.inner_iters = cfg.w_inner_iters;
    ctx.rel_tol = cfg.w_rel_tol;
    ctx.hht = current.h * current.h.transpose();
    ctx.xht = x * current.h.transpose();

    ObjectiveValue last = eval_objective_cached(x_norm_sq, ctx.xht, ctx.hht, current.w, cfg.lambda, result.kind);
    result.trace.push_back({0, last, seconds_since(t0)});
    bool warned_skip = false;

    int t = 1;
    for (; t <= cfg.outer_iters; ++t) {
        DenseMatrix w_next;
        switch (result.kind.tag) {
            case RegularizerTag::Det: {
                DetSweepReport report;
                w_next = update_w_det(current.w, ctx, &report);
                if (!report.skipped_columns.empty() && !warned_skip) {
                    result.warnings.push_back("iteration " + std::to_string(t) +
                                              ": column(s) with zero abundance row left unchanged");
                    warned_skip = true;
                }
                break;
            }
            case RegularizerTag::LogDet: {
                const MajorizerWeights weights = logdet_majorizer(current.w, *result.kind.delta);
                w_next = update_w_logdet(current.w, ctx, weights);
                break;
            }
            case RegularizerTag::Nuclear:
                w_next = update_w_nuclear(current.w, ctx);
                if (numerically_rank_deficient(w_next)) {
                    result.status = RunStatus::RankDeficient;
                    result.warnings.push_back("iteration " + std::to_string(t) +
                                              ": singular value thresholding collapsed the rank of W");
                    break;
                }
                break;
        }
        if (result.status == RunStatus::RankDeficient) {
            break;
        }
        current.w = std::move(w_next);
        const DenseMatrix wtw = current.w.transpose() * current.w;
        const DenseMatrix wtx = current.w.transpose() * x;
        current.h = solve_h_from_gram(wtw, wtx, current.h, cfg.h_opts, threads);

        ctx.hht.noalias() = current.h * current.h.transpose();
        ctx.xht.noalias() = x * current.h.transpose();
        const ObjectiveValue value =
            eval_objective_cached(x_norm_sq, ctx.xht, ctx.hht, current.w, cfg.lambda, result.kind);
        const bool record = (t % cfg.trace_every == 0) || t == cfg.outer_iters;
        bool stop = false;
        if (cfg.early_exit_rel_change &&
            std::abs(value.total - last.total) <= *cfg.early_exit_rel_change * std::abs(last.total)) {
            stop = true;
        }
        last = value;
        if (record || stop) {
            result.trace.push_back({t, value, seconds_since(t0)});
        }
        if (stop) {
            result.status = RunStatus::Converged;
            break;
        }
    }
    result.iterations = std::min(t, cfg.outer_iters);
    if (result.status == RunStatus::RankDeficient) {
        result.iterations = t - 1;
    }
    result.factors = std::move(current);
    return result;
}

RunResult run(const DenseMatrix& x, Eigen::Index r, const SolverConfig& cfg) {
    cfg.validate();
    const FactorPair start = initialize(x, r, cfg.h_opts, cfg.threads);
    return run_from(x, start, cfg);
}

OptimalityResiduals optimality_residuals(const DenseMatrix& x, const FactorPair& factors, double lambda,
                                         const RegularizerKind& kind) {
    const DenseMatrix& w = factors.w;
    const DenseMatrix& h = factors.h;
    const DenseMatrix hht = h * h.transpose();
    const DenseMatrix xht = x * h.transpose();
    DenseMatrix grad_w = w * hht - xht;
    if (lambda > 0.0) {
        const DenseMatrix gram = w.transpose() * w;
        const Eigen::Index r = w.cols();
        if (kind.tag == RegularizerTag::Det) {
            // d/dW 1/2 det(W^T W) = det(W^T W) W (W^T W)^{-1}
            const double det = 2.0 * eval_volume(w, kind);
            grad_w += lambda * det * w * gram.ldlt().solve(DenseMatrix::Identity(r, r));
        } else if (kind.tag == RegularizerTag::LogDet) {
            const RegularizerKind resolved = resolve_kind(kind, w);
            grad_w += lambda * w * logdet_majorizer(w, *resolved.delta).d;
        } else {
            throw ContractError("optimality_residuals: nuclear regularizer is nonsmooth");
        }
    }
    OptimalityResiduals res;
    const double xht_norm = std::max(xht.norm(), 1e-300);
    res.w = (w - (w - grad_w).cwiseMax(0.0)).norm() / xht_norm;

    const DenseMatrix wtw = w.transpose() * w;
    const DenseMatrix wtx = w.transpose() * x;
    const double lipschitz = std::max(spectral_norm_sq(wtw), 1e-300);
    DenseMatrix step = h - (wtw * h - wtx) / lipschitz;
    std::vector<double> scratch;
    for (Eigen::Index j = 0; j < step.cols(); ++j) {
        Vector col = step.col(j);
        project_simplex_inplace(col, scratch);
        step.col(j) = col;
    }
    res.h = (h - step).norm() * lipschitz / std::max(wtx.norm(), 1e-300);
    return res;
}

}  // namespace vrnmf
