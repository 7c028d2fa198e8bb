#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

#include "vrnmf/errors.hpp"

namespace vrnmf {

using DenseMatrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Numerical tolerances used by the matrix primitives.
struct Tolerances {
    double orthonormality = 1e-10;
    double symmetry = 1e-8;
    /// Relative pivot threshold below which a column set counts as rank deficient.
    double rank = 1e-12;
};

/// Thin singular value decomposition y = u * diag(sigma) * v^T, sigma
/// sorted non-increasing.
struct SvdTriple {
    DenseMatrix u;
    Vector sigma;
    DenseMatrix v;
};

/// Throws DimensionError unless every entry of `a` is finite.
void require_finite(const DenseMatrix& a, const char* what);

SvdTriple thin_svd(const DenseMatrix& y);

/// Euclidean projection onto {v >= 0, sum(v) <= 1}. Sort based, O(r log r).
Vector project_simplex(const Vector& h);

/// In-place variant used by the inner solvers; no allocation beyond a small
/// scratch buffer.
void project_simplex_inplace(Eigen::Ref<Vector> h, std::vector<double>& scratch);

/// Singular value thresholding: U max(S - theta, 0) V^T, the proximal
/// operator of theta * ||.||_*.
DenseMatrix svt(const DenseMatrix& y, double theta);

/// Orthonormal basis of the null space of w_minus_i^T, i.e. the orthogonal
/// complement of range(w_minus_i). Result is m x (m - k) for an m x k input.
DenseMatrix null_space_basis(const DenseMatrix& w_minus_i, const Tolerances& tol = {});

/// Largest eigenvalue of a symmetric PSD matrix. Exact eigendecomposition for
/// k <= 32, deterministic power iteration otherwise.
double spectral_norm_sq(const DenseMatrix& a, const Tolerances& tol = {});

/// Power iteration path of spectral_norm_sq, exposed for testing.
double spectral_norm_sq_power(const DenseMatrix& a, double rel_tol = 1e-9, int max_iters = 10000);

/// Frobenius inner product <a, b>.
inline double frobenius_dot(const DenseMatrix& a, const DenseMatrix& b) {
    return a.cwiseProduct(b).sum();
}

}  // namespace vrnmf
