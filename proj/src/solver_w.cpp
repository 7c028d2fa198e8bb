#include "vrnmf/solver_w.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "vrnmf/apg.hpp"

namespace vrnmf {

namespace {

void check_context(const DenseMatrix& w, const WUpdateContext& ctx, RegularizerTag expected, const char* who) {
    if (ctx.kind.tag != expected) {
        throw ContractError(std::string(who) + ": context regularizer does not match");
    }
    if (ctx.hht.rows() != w.cols() || ctx.hht.cols() != w.cols() || ctx.xht.rows() != w.rows() ||
        ctx.xht.cols() != w.cols()) {
        throw DimensionError(std::string(who) + ": HH^T must be r x r and XH^T m x r");
    }
    if (!(ctx.lambda >= 0.0) || ctx.inner_iters < 1 || !(ctx.rel_tol > 0.0)) {
        throw ContractError(std::string(who) + ": invalid lambda, inner_iters or rel_tol");
    }
    require_finite(w, who);
}

std::string column_list_without(Eigen::Index r, Eigen::Index skip) {
    std::string out = "{";
    bool first = true;
    for (Eigen::Index j = 0; j < r; ++j) {
        if (j == skip) continue;
        if (!first) out += ",";
        out += std::to_string(j);
        first = false;
    }
    return out + "}";
}

void clamp_nonnegative(DenseMatrix& w) { w = w.cwiseMax(0.0); }

}  // namespace

WUpdateContext WUpdateContext::from(const DenseMatrix& x, const DenseMatrix& h, double lambda, RegularizerKind kind,
                                    int inner_iters, double rel_tol) {
    if (x.cols() != h.cols()) {
        throw DimensionError("WUpdateContext: X and H column counts differ");
    }
    WUpdateContext ctx;
    ctx.hht = h * h.transpose();
    ctx.xht = x * h.transpose();
    ctx.lambda = lambda;
    ctx.kind = kind;
    ctx.inner_iters = inner_iters;
    ctx.rel_tol = rel_tol;
    return ctx;
}

ColumnVolumeFactor column_volume_factor(const DenseMatrix& w, Eigen::Index column, const Tolerances& tol) {
    const Eigen::Index m = w.rows();
    const Eigen::Index r = w.cols();
    if (column < 0 || column >= r) {
        throw DimensionError("column_volume_factor: column index out of range");
    }
    ColumnVolumeFactor factor;
    if (r == 1) {
        factor.range_basis = DenseMatrix(m, 0);
        return factor;
    }
    DenseMatrix others(m, r - 1);
    for (Eigen::Index j = 0, k = 0; j < r; ++j) {
        if (j != column) others.col(k++) = w.col(j);
    }
    if (r - 1 >= m) {
        throw DegeneracyError("W without column " + std::to_string(column) + " has " + std::to_string(r - 1) +
                              " columns in dimension " + std::to_string(m) + "; null space is trivial");
    }
    Eigen::HouseholderQR<DenseMatrix> qr(others);
    const auto& packed = qr.matrixQR();
    const double scale = std::max(others.colwise().norm().maxCoeff(), 1e-300);
    double gamma = 1.0;
    for (Eigen::Index j = 0; j < r - 1; ++j) {
        const double pivot = packed(j, j);
        if (std::abs(pivot) <= tol.rank * scale) {
            throw DegeneracyError("columns " + column_list_without(r, column) + " of W are linearly dependent");
        }
        gamma *= pivot * pivot;
    }
    factor.gamma = gamma;
    factor.range_basis = qr.householderQ() * DenseMatrix::Identity(m, r - 1);
    return factor;
}

DenseMatrix update_w_det(const DenseMatrix& w_in, const WUpdateContext& ctx, DetSweepReport* report) {
    check_context(w_in, ctx, RegularizerTag::Det, "update_w_det");
    const Eigen::Index r = w_in.cols();
    DenseMatrix w = w_in;
    ApgOptions opts;
    opts.max_iters = ctx.inner_iters;
    opts.rel_tol = ctx.rel_tol;
    opts.restart = true;

    for (Eigen::Index i = 0; i < r; ++i) {
        const double h_norm_sq = ctx.hht(i, i);
        if (!(h_norm_sq > 0.0)) {
            if (report) report->skipped_columns.push_back(i);
            continue;
        }
        // b = X_i h^{iT} = XH^T(:,i) - sum_{j != i} w_j (HH^T)(j,i)
        const Vector b = ctx.xht.col(i) - w * ctx.hht.col(i) + w.col(i) * h_norm_sq;

        double weight = 0.0;
        DenseMatrix basis;
        if (ctx.lambda > 0.0) {
            ColumnVolumeFactor factor = column_volume_factor(w, i);
            weight = ctx.lambda * factor.gamma;
            basis = std::move(factor.range_basis);
        }
        // (I - U U^T) y applied without forming the m x m projector.
        auto complement = [&](const Vector& y) -> Vector {
            if (basis.cols() == 0) return y;
            return y - basis * (basis.transpose() * y);
        };
        auto grad = [&](const Vector& y, Vector& g) {
            g = h_norm_sq * y - b;
            if (weight > 0.0) g += weight * complement(y);
        };
        auto objective = [&](const Vector& y) {
            double value = 0.5 * h_norm_sq * y.squaredNorm() - b.dot(y);
            if (weight > 0.0) value += 0.5 * weight * complement(y).squaredNorm();
            return value;
        };
        auto project = [](Vector& y) { y = y.cwiseMax(0.0); };

        Vector column = w.col(i).cwiseMax(0.0);
        apg_minimize(column, h_norm_sq + weight, grad, objective, project, opts);
        w.col(i) = column;
    }
    return w;
}

MajorizerWeights logdet_majorizer(const DenseMatrix& w_anchor, double delta) {
    if (!(delta > 0.0) || !std::isfinite(delta)) {
        throw ContractError("logdet_majorizer: delta must be positive");
    }
    require_finite(w_anchor, "logdet_majorizer");
    const Eigen::Index r = w_anchor.cols();
    MajorizerWeights weights;
    Vector sigma_sq = Vector::Zero(r);
    if (w_anchor.size() > 0) {
        Eigen::JacobiSVD<DenseMatrix> svd(w_anchor, Eigen::ComputeFullV);
        sigma_sq.head(svd.singularValues().size()) = svd.singularValues().array().square();
        weights.basis = svd.matrixV();
    } else {
        weights.basis = DenseMatrix::Identity(r, r);
    }
    const Vector shifted = sigma_sq.array() + delta;
    weights.eigenvalues = shifted.cwiseInverse();
    weights.anchor_energy = (w_anchor * weights.basis).colwise().squaredNorm().transpose();
    weights.anchor_logdet = shifted.array().log().sum();
    weights.d = weights.basis * weights.eigenvalues.asDiagonal() * weights.basis.transpose();
    // Symmetrize away rounding so downstream symmetry checks hold exactly.
    weights.d = 0.5 * (weights.d + weights.d.transpose()).eval();
    return weights;
}

namespace {

// tr(W D W^T) summed in the eigenbasis of D, free of cancellation between
// large entries of W D.
double weighted_energy(const DenseMatrix& w, const MajorizerWeights& weights) {
    return (w * weights.basis).colwise().squaredNorm().dot(weights.eigenvalues.transpose());
}

}  // namespace

double logdet_upper_bound(const DenseMatrix& w, const DenseMatrix& w_anchor, double delta) {
    if (w.rows() != w_anchor.rows() || w.cols() != w_anchor.cols()) {
        throw DimensionError("logdet_upper_bound: W and anchor differ in shape");
    }
    const MajorizerWeights weights = logdet_majorizer(w_anchor, delta);
    const Vector energy = (w * weights.basis).colwise().squaredNorm().transpose();
    return weights.anchor_logdet + weights.eigenvalues.dot(energy - weights.anchor_energy);
}

double logdet_surrogate(const DenseMatrix& w, const WUpdateContext& ctx, const MajorizerWeights& weights) {
    return 0.5 * frobenius_dot(w.transpose() * w, ctx.hht) - frobenius_dot(ctx.xht, w) +
           0.5 * ctx.lambda * weighted_energy(w, weights);
}

DenseMatrix update_w_logdet(const DenseMatrix& w_in, const WUpdateContext& ctx, const MajorizerWeights& weights) {
    check_context(w_in, ctx, RegularizerTag::LogDet, "update_w_logdet");
    const Eigen::Index r = w_in.cols();
    if (weights.d.rows() != r || weights.d.cols() != r || weights.basis.rows() != r ||
        weights.basis.cols() != r || weights.eigenvalues.size() != r) {
        throw DimensionError("update_w_logdet: D must be r x r");
    }
    // Phi(W) = 1/2 <W^T W, HH^T> - <XH^T, W> + lambda/2 tr(W D W^T).
    const DenseMatrix scaled_basis = weights.basis * (ctx.lambda * weights.eigenvalues).asDiagonal();
    auto grad = [&](const DenseMatrix& y, DenseMatrix& g) {
        g.noalias() = y * ctx.hht - ctx.xht;
        g.noalias() += (y * weights.basis) * scaled_basis.transpose();
    };
    auto objective = [&](const DenseMatrix& y) { return logdet_surrogate(y, ctx, weights); };
    auto project = [](DenseMatrix& y) { clamp_nonnegative(y); };

    ApgOptions opts;
    opts.max_iters = ctx.inner_iters;
    opts.rel_tol = ctx.rel_tol;
    opts.restart = true;
    DenseMatrix w = w_in.cwiseMax(0.0);
    const DenseMatrix a = ctx.hht + ctx.lambda * weights.d;
    apg_minimize(w, spectral_norm_sq(a), grad, objective, project, opts);
    return w;
}

DenseMatrix update_w_nuclear(const DenseMatrix& w_in, const WUpdateContext& ctx) {
    check_context(w_in, ctx, RegularizerTag::Nuclear, "update_w_nuclear");
    const double lipschitz = spectral_norm_sq(ctx.hht);
    if (!(lipschitz > 0.0)) {
        throw ContractError("update_w_nuclear: HH^T is zero, no valid step size");
    }
    const double alpha = 1.0 / lipschitz;
    DenseMatrix w = w_in;
    for (int k = 0; k < ctx.inner_iters; ++k) {
        const DenseMatrix gradient_step = w - alpha * (w * ctx.hht - ctx.xht);
        DenseMatrix next = svt(gradient_step, alpha * ctx.lambda);
        clamp_nonnegative(next);
        const double change = (next - w).norm();
        w = std::move(next);
        if (change <= ctx.rel_tol * w.norm()) {
            break;
        }
    }
    return w;
}

}  // namespace vrnmf
