#pragma once

#include <vector>

#include "vrnmf/matrix_core.hpp"
#include "vrnmf/regularizers.hpp"

namespace vrnmf {

/// Terms of the W subproblem that do not depend on W, computed once per
/// outer iteration and reused by every inner step.
struct WUpdateContext {
    DenseMatrix hht;  ///< H H^T, r x r
    DenseMatrix xht;  ///< X H^T, m x r
    double lambda = 0.0;
    RegularizerKind kind;
    int inner_iters = 50;
    double rel_tol = 1e-8;

    static WUpdateContext from(const DenseMatrix& x, const DenseMatrix& h, double lambda, RegularizerKind kind,
                               int inner_iters = 50, double rel_tol = 1e-8);
};

/// Weight matrix D = (Y^T Y + delta I)^{-1} of the log-det majorizer
/// anchored at Y.
/// D = (Y^T Y + delta I)^{-1} = basis * diag(eigenvalues) * basis^T.
struct MajorizerWeights {
    DenseMatrix d;
    DenseMatrix basis;
    Vector eigenvalues;
    /// ||Y basis_k||^2 for the anchor Y.
    Vector anchor_energy;
    /// log det(Y^T Y + delta I).
    double anchor_logdet = 0.0;
};

struct DetSweepReport {
    /// Columns left untouched because their row of H is identically zero.
    std::vector<Eigen::Index> skipped_columns;
};

/// One ascending sweep of block coordinate descent over the columns of W for
/// fit + lambda/2 det(W^T W). Each column subproblem
///   min_{w >= 0} 1/2 w^T (||h^i||^2 I + lambda gamma_i Q_i Q_i^T) w - <b_i, w>
/// is solved by accelerated projected gradient with step 1/(||h^i||^2 + lambda gamma_i).
DenseMatrix update_w_det(const DenseMatrix& w, const WUpdateContext& ctx, DetSweepReport* report = nullptr);

/// gamma_i = det(W_{-i}^T W_{-i}) and the projector onto range(W_{-i})^perp
/// applied as I - U U^T with U an orthonormal basis of range(W_{-i}).
struct ColumnVolumeFactor {
    double gamma = 1.0;
    DenseMatrix range_basis;  ///< m x (r-1)
};

/// Factor det(W^T W) = gamma_i * w_i^T Q_i Q_i^T w_i for column i.
/// Throws DegeneracyError when W without column i is rank deficient.
ColumnVolumeFactor column_volume_factor(const DenseMatrix& w, Eigen::Index column, const Tolerances& tol = {});

MajorizerWeights logdet_majorizer(const DenseMatrix& w_anchor, double delta);

/// Upper bound of log det(W^T W + delta I) from the first-order expansion at
/// the anchor: log det(Y^T Y + delta I) + tr(D (W^T W - Y^T Y)).
double logdet_upper_bound(const DenseMatrix& w, const DenseMatrix& w_anchor, double delta);

/// Phi(W) = 1/2 <W^T W, HH^T> - <XH^T, W> + lambda/2 tr(W D W^T).
double logdet_surrogate(const DenseMatrix& w, const WUpdateContext& ctx, const MajorizerWeights& weights);

/// Minimize Phi over W >= 0 with ctx.inner_iters accelerated steps.
DenseMatrix update_w_logdet(const DenseMatrix& w, const WUpdateContext& ctx, const MajorizerWeights& weights);

/// ctx.inner_iters proximal gradient steps: gradient step with alpha =
/// 1/||HH^T||_2, singular value thresholding at alpha*lambda, then clamp to
/// the nonnegative orthant.
DenseMatrix update_w_nuclear(const DenseMatrix& w, const WUpdateContext& ctx);

}  // namespace vrnmf
