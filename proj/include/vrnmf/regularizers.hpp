#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "vrnmf/matrix_core.hpp"

namespace vrnmf {

enum class RegularizerTag { Det, LogDet, Nuclear };

/// Volume regularizer choice.
///   Det     : 1/2 det(W^T W)
///   LogDet  : 1/2 log det(W^T W + delta I)
///   Nuclear : sum of singular values of W
/// For LogDet an unset delta is resolved by the solver from the initial W
/// (see default_logdet_delta); it must be positive once set.
struct RegularizerKind {
    RegularizerTag tag = RegularizerTag::Det;
    std::optional<double> delta;

    static RegularizerKind det() { return {RegularizerTag::Det, std::nullopt}; }
    static RegularizerKind logdet(std::optional<double> delta = std::nullopt);
    static RegularizerKind nuclear() { return {RegularizerTag::Nuclear, std::nullopt}; }

    /// Throws ContractError if a set delta is not positive.
    void validate() const;
};

std::string_view to_string(RegularizerTag tag);
/// Accepts "det", "logdet", "nuclear" (case-insensitive).
RegularizerTag parse_regularizer(std::string_view name);

/// 1e-8 * trace(W^T W) / r, floored at the smallest positive normal double.
double default_logdet_delta(const DenseMatrix& w);

struct ObjectiveValue {
    double fit = 0.0;     ///< 1/2 ||X - WH||_F^2
    double volume = 0.0;  ///< V(W)
    double lambda = 0.0;
    double total = 0.0;   ///< fit + lambda * volume
};

double eval_volume(const DenseMatrix& w, const RegularizerKind& kind);

ObjectiveValue eval_objective(const DenseMatrix& x, const DenseMatrix& w, const DenseMatrix& h,
                              double lambda, const RegularizerKind& kind);

/// Objective from precomputed ||X||_F^2, XH^T and HH^T. Avoids forming WH.
ObjectiveValue eval_objective_cached(double x_norm_sq, const DenseMatrix& xht, const DenseMatrix& hht,
                                     const DenseMatrix& w, double lambda, const RegularizerKind& kind);

/// ||X - WH||_F / ||X||_F computed directly.
double relative_residual(const DenseMatrix& x, const DenseMatrix& w, const DenseMatrix& h);

}  // namespace vrnmf
