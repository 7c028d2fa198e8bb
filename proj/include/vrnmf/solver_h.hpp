#pragma once

#include "vrnmf/apg.hpp"
#include "vrnmf/matrix_core.hpp"

namespace vrnmf {

/// Slack allowed when checking that a vector lies in {h >= 0, sum(h) <= 1}.
inline constexpr double kSimplexSlack = 1e-10;

bool in_unit_simplex(const Eigen::Ref<const Vector>& h, double slack = kSimplexSlack);

/// argmin_{h in simplex} 1/2 ||x_col - W h||^2 by accelerated projected
/// gradient, warm started at h0.
Vector solve_h_column(const DenseMatrix& w, const Vector& x_col, const Vector& h0, const ApgOptions& opts = {});

/// Column-wise solve of all n simplex least squares problems. W^T W and
/// W^T X are formed once. Columns are independent, so the result does not
/// depend on `threads`.
DenseMatrix solve_h(const DenseMatrix& w, const DenseMatrix& x, const DenseMatrix& h0, const ApgOptions& opts = {},
                    int threads = 1);

/// Same as solve_h, from precomputed W^T W (r x r) and W^T X (r x n).
DenseMatrix solve_h_from_gram(const DenseMatrix& wtw, const DenseMatrix& wtx, const DenseMatrix& h0,
                              const ApgOptions& opts = {}, int threads = 1);

}  // namespace vrnmf
