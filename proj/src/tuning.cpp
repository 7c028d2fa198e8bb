#include "vrnmf/tuning.hpp"

#include <cmath>
#include <map>

#include "vrnmf/metrics.hpp"

namespace vrnmf {

namespace {

class ScoreCache {
public:
    explicit ScoreCache(const LambdaScorer& score) : score_(score) {}

    double operator()(double lambda_tilde) {
        if (const auto it = seen_.find(lambda_tilde); it != seen_.end()) {
            return it->second;
        }
        TuneEvaluation eval{lambda_tilde, 100.0, false};
        try {
            eval.mrsa = score_(lambda_tilde);
            if (!std::isfinite(eval.mrsa)) {
                eval.mrsa = 100.0;
                eval.failed = true;
            }
        } catch (const std::exception&) {
            eval.failed = true;
        }
        seen_.emplace(lambda_tilde, eval.mrsa);
        evaluations_.push_back(eval);
        return eval.mrsa;
    }

    TuneResult best() const {
        TuneResult result;
        result.evaluations = evaluations_;
        const TuneEvaluation* best = nullptr;
        for (const auto& e : evaluations_) {
            if (!best || e.mrsa < best->mrsa) best = &e;
        }
        if (best) {
            result.lambda_tilde = best->lambda_tilde;
            result.lambda = best->lambda_tilde;
            result.mrsa = best->mrsa;
        }
        return result;
    }

private:
    const LambdaScorer& score_;
    std::map<double, double> seen_;
    std::vector<TuneEvaluation> evaluations_;
};

void check_options(const TuneOptions& opts) {
    if (!(opts.lower < opts.upper) || !(opts.lower >= 0.0) || opts.max_rounds < 0 || !(opts.improvement_tol >= 0.0)) {
        throw ContractError("TuneOptions: need 0 <= lower < upper, max_rounds >= 0, improvement_tol >= 0");
    }
}

}  // namespace

TuneResult bisection_search(const LambdaScorer& score, const TuneOptions& opts) {
    check_options(opts);
    ScoreCache cache(score);
    double a = opts.lower;
    double b = opts.upper;
    double c = 0.5 * (a + b);
    double score_a = cache(a);
    double score_b = cache(b);
    double score_c = cache(c);
    int rounds = 0;
    while (rounds < opts.max_rounds) {
        ++rounds;
        const double lower_sum = score_a + score_c;
        const double upper_sum = score_c + score_b;
        bool keep_lower = lower_sum < upper_sum;
        if (lower_sum == upper_sum) {
            const double left = cache(0.5 * (a + c));
            const double right = cache(0.5 * (c + b));
            keep_lower = left <= right;
        }
        if (keep_lower) {
            b = c;
            score_b = score_c;
        } else {
            a = c;
            score_a = score_c;
        }
        const double previous_mid = score_c;
        c = 0.5 * (a + b);
        score_c = cache(c);
        if (std::abs(score_c - previous_mid) <= opts.improvement_tol) {
            break;
        }
    }
    TuneResult result = cache.best();
    result.bisection_rounds = rounds;
    return result;
}

TuneResult grid_search(const LambdaScorer& score, int points, const TuneOptions& opts) {
    check_options(opts);
    if (points < 2) {
        throw ContractError("grid_search: need at least 2 points");
    }
    ScoreCache cache(score);
    for (int k = 0; k < points; ++k) {
        const double t = static_cast<double>(k) / static_cast<double>(points - 1);
        cache(opts.lower + t * (opts.upper - opts.lower));
    }
    return cache.best();
}

SolverScorer::SolverScorer(const DenseMatrix& x_in, const DenseMatrix& w_true_in, Eigen::Index r,
                           const SolverConfig& cfg_in)
    : x(x_in), w_true(w_true_in), cfg(cfg_in) {
    cfg.validate();
    if (w_true.rows() != x.rows() || w_true.cols() != r) {
        throw DimensionError("tune_lambda: W_true must be m x r");
    }
    start = initialize(x, r, cfg.h_opts, cfg.threads);
    cfg.kind = resolve_kind(cfg.kind, start.w);
    lambda_scale = vrnmf::lambda_scale(x, start, cfg.kind);
}

double SolverScorer::operator()(double lambda_tilde) const {
    SolverConfig run_cfg = cfg;
    run_cfg.lambda = lambda_tilde * lambda_scale;
    const RunResult result = run_from(x, start, run_cfg);
    return mrsa_matched(result.factors.w, w_true).score;
}

TuneResult tune_lambda(const DenseMatrix& x, const DenseMatrix& w_true, Eigen::Index r, const SolverConfig& cfg_base,
                       const TuneOptions& opts) {
    const SolverScorer scorer(x, w_true, r, cfg_base);
    TuneResult result = bisection_search([&](double t) { return scorer(t); }, opts);
    result.lambda_scale = scorer.lambda_scale;
    result.lambda = result.lambda_tilde * scorer.lambda_scale;
    return result;
}

}  // namespace vrnmf
