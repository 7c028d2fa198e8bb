#include "vrnmf/matrix_core.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

namespace vrnmf {

void require_finite(const DenseMatrix& a, const char* what) {
    if (!a.allFinite()) {
        throw DimensionError(std::string(what) + ": matrix contains NaN or Inf");
    }
}

SvdTriple thin_svd(const DenseMatrix& y) {
    Eigen::JacobiSVD<DenseMatrix> svd(y, Eigen::ComputeThinU | Eigen::ComputeThinV);
    return {svd.matrixU(), svd.singularValues(), svd.matrixV()};
}

void project_simplex_inplace(Eigen::Ref<Vector> h, std::vector<double>& scratch) {
    const Eigen::Index r = h.size();
    double positive_sum = 0.0;
    for (Eigen::Index i = 0; i < r; ++i) {
        positive_sum += std::max(h[i], 0.0);
    }
    if (positive_sum <= 1.0) {
        h = h.cwiseMax(0.0);
        return;
    }
    // Outside the simplex with sum(h+) > 1: the constraint sum <= 1 is active,
    // so the projection is [h - l]_+ with l chosen to make the sum exactly 1.
    scratch.assign(h.data(), h.data() + r);
    std::sort(scratch.begin(), scratch.end(), std::greater<>());
    double cumulative = 0.0;
    double multiplier = 0.0;
    for (Eigen::Index j = 0; j < r; ++j) {
        cumulative += scratch[j];
        const double candidate = (cumulative - 1.0) / static_cast<double>(j + 1);
        if (scratch[j] - candidate > 0.0) {
            multiplier = candidate;
        }
    }
    for (Eigen::Index i = 0; i < r; ++i) {
        h[i] = std::max(h[i] - multiplier, 0.0);
    }
}

Vector project_simplex(const Vector& h) {
    if (h.size() == 0) {
        throw DimensionError("project_simplex: empty vector");
    }
    if (!h.allFinite()) {
        throw DimensionError("project_simplex: vector contains NaN or Inf");
    }
    Vector out = h;
    std::vector<double> scratch;
    project_simplex_inplace(out, scratch);
    return out;
}

DenseMatrix svt(const DenseMatrix& y, double theta) {
    if (!(theta >= 0.0)) {
        throw ContractError("svt: threshold must be nonnegative");
    }
    require_finite(y, "svt");
    if (y.size() == 0) {
        return y;
    }
    const SvdTriple s = thin_svd(y);
    const Vector shrunk = (s.sigma.array() - theta).cwiseMax(0.0).matrix();
    return s.u * shrunk.asDiagonal() * s.v.transpose();
}

DenseMatrix null_space_basis(const DenseMatrix& w_minus_i, const Tolerances& tol) {
    const Eigen::Index m = w_minus_i.rows();
    const Eigen::Index k = w_minus_i.cols();
    require_finite(w_minus_i, "null_space_basis");
    if (k >= m) {
        throw DegeneracyError("null_space_basis: input is " + std::to_string(m) + "x" +
                              std::to_string(k) + ", null space of its transpose is trivial");
    }
    if (k == 0) {
        return DenseMatrix::Identity(m, m);
    }
    Eigen::HouseholderQR<DenseMatrix> qr(w_minus_i);
    const DenseMatrix& packed = qr.matrixQR();
    const double scale = w_minus_i.colwise().norm().maxCoeff();
    for (Eigen::Index j = 0; j < k; ++j) {
        if (std::abs(packed(j, j)) <= tol.rank * std::max(scale, 1e-300)) {
            throw DegeneracyError("null_space_basis: columns 0.." + std::to_string(j) +
                                  " are linearly dependent");
        }
    }
    const DenseMatrix q = qr.householderQ() * DenseMatrix::Identity(m, m);
    return q.rightCols(m - k);
}

namespace {

void require_symmetric(const DenseMatrix& a, const Tolerances& tol) {
    if (a.rows() != a.cols()) {
        throw DimensionError("spectral_norm_sq: matrix is not square");
    }
    require_finite(a, "spectral_norm_sq");
    const double scale = a.cwiseAbs().maxCoeff();
    const double asym = (a - a.transpose()).cwiseAbs().maxCoeff();
    if (asym > tol.symmetry * std::max(scale, 1e-300)) {
        throw ContractError("spectral_norm_sq: matrix is not symmetric");
    }
}

}  // namespace

double spectral_norm_sq_power(const DenseMatrix& a, double rel_tol, int max_iters) {
    const Eigen::Index k = a.rows();
    if (k == 0) {
        return 0.0;
    }
    // Fixed, non-degenerate start vector keeps the result deterministic.
    Vector v(k);
    for (Eigen::Index i = 0; i < k; ++i) {
        v[i] = 1.0 + 0.5 * std::sin(static_cast<double>(i + 1));
    }
    v.normalize();
    double estimate = 0.0;
    for (int it = 0; it < max_iters; ++it) {
        Vector next = a * v;
        const double norm = next.norm();
        if (norm == 0.0) {
            return 0.0;
        }
        const double rayleigh = v.dot(next);
        v = next / norm;
        if (it > 0 && std::abs(rayleigh - estimate) <= rel_tol * std::abs(rayleigh)) {
            return rayleigh;
        }
        estimate = rayleigh;
    }
    return estimate;
}

double spectral_norm_sq(const DenseMatrix& a, const Tolerances& tol) {
    require_symmetric(a, tol);
    if (a.rows() == 0) {
        return 0.0;
    }
    if (a.rows() <= 32) {
        Eigen::SelfAdjointEigenSolver<DenseMatrix> eig(a, Eigen::EigenvaluesOnly);
        return std::max(eig.eigenvalues().maxCoeff(), 0.0);
    }
    return spectral_norm_sq_power(a);
}

}  // namespace vrnmf
