#include "vrnmf/regularizers.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>

namespace vrnmf {

RegularizerKind RegularizerKind::logdet(std::optional<double> delta) {
    RegularizerKind kind{RegularizerTag::LogDet, delta};
    kind.validate();
    return kind;
}

void RegularizerKind::validate() const {
    if (delta && !(*delta > 0.0 && std::isfinite(*delta))) {
        throw ContractError("logdet delta must be positive and finite");
    }
}

std::string_view to_string(RegularizerTag tag) {
    switch (tag) {
        case RegularizerTag::Det:
            return "det";
        case RegularizerTag::LogDet:
            return "logdet";
        case RegularizerTag::Nuclear:
            return "nuclear";
    }
    return "unknown";
}

RegularizerTag parse_regularizer(std::string_view name) {
    std::string lower(name);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (lower == "det") return RegularizerTag::Det;
    if (lower == "logdet") return RegularizerTag::LogDet;
    if (lower == "nuclear") return RegularizerTag::Nuclear;
    throw ContractError("unknown regularizer '" + std::string(name) + "' (expected det, logdet or nuclear)");
}

double default_logdet_delta(const DenseMatrix& w) {
    const double r = static_cast<double>(std::max<Eigen::Index>(w.cols(), 1));
    return std::max(1e-8 * w.squaredNorm() / r, std::numeric_limits<double>::min());
}

double eval_volume(const DenseMatrix& w, const RegularizerKind& kind) {
    require_finite(w, "eval_volume");
    const Eigen::Index r = w.cols();
    switch (kind.tag) {
        case RegularizerTag::Det: {
            Eigen::LLT<DenseMatrix> llt(w.transpose() * w);
            if (llt.info() != Eigen::Success) {
                return 0.0;
            }
            const auto diag = llt.matrixLLT().diagonal();
            double det = 1.0;
            for (Eigen::Index i = 0; i < r; ++i) {
                det *= diag[i] * diag[i];
            }
            return 0.5 * det;
        }
        case RegularizerTag::LogDet: {
            if (!kind.delta) {
                throw ContractError("eval_volume: logdet requires delta");
            }
            kind.validate();
            // Singular values of W keep sigma^2 accurate below delta, where
            // the Gram matrix loses it to rounding.
            Vector sigma = Vector::Zero(r);
            if (w.size() > 0) {
                const Vector s = Eigen::JacobiSVD<DenseMatrix>(w).singularValues();
                sigma.head(s.size()) = s;
            }
            return 0.5 * (sigma.array().square() + *kind.delta).log().sum();
        }
        case RegularizerTag::Nuclear:
            if (w.size() == 0) return 0.0;
            return Eigen::JacobiSVD<DenseMatrix>(w).singularValues().sum();
    }
    return 0.0;
}

ObjectiveValue eval_objective_cached(double x_norm_sq, const DenseMatrix& xht, const DenseMatrix& hht,
                                     const DenseMatrix& w, double lambda, const RegularizerKind& kind) {
    if (xht.rows() != w.rows() || xht.cols() != w.cols() || hht.rows() != w.cols() ||
        hht.cols() != w.cols()) {
        throw DimensionError("eval_objective: XH^T, HH^T and W do not conform");
    }
    ObjectiveValue value;
    const double expanded = x_norm_sq - 2.0 * frobenius_dot(xht, w) + frobenius_dot(w.transpose() * w, hht);
    value.fit = std::max(0.5 * expanded, 0.0);
    value.volume = eval_volume(w, kind);
    value.lambda = lambda;
    value.total = value.fit + lambda * value.volume;
    return value;
}

ObjectiveValue eval_objective(const DenseMatrix& x, const DenseMatrix& w, const DenseMatrix& h,
                              double lambda, const RegularizerKind& kind) {
    if (x.rows() != w.rows() || w.cols() != h.rows() || h.cols() != x.cols()) {
        throw DimensionError("eval_objective: expected X (m x n), W (m x r), H (r x n)");
    }
    if (!(lambda >= 0.0)) {
        throw ContractError("eval_objective: lambda must be nonnegative");
    }
    require_finite(x, "eval_objective X");
    require_finite(h, "eval_objective H");
    const DenseMatrix xht = x * h.transpose();
    const DenseMatrix hht = h * h.transpose();
    return eval_objective_cached(x.squaredNorm(), xht, hht, w, lambda, kind);
}

double relative_residual(const DenseMatrix& x, const DenseMatrix& w, const DenseMatrix& h) {
    if (x.rows() != w.rows() || w.cols() != h.rows() || h.cols() != x.cols()) {
        throw DimensionError("relative_residual: dimensions do not conform");
    }
    const double denom = x.norm();
    const double num = (x - w * h).norm();
    return denom > 0.0 ? num / denom : num;
}

}  // namespace vrnmf
