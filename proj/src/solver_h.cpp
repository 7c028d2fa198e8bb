#include "vrnmf/solver_h.hpp"

#include <string>
#include <vector>

#include "vrnmf/parallel.hpp"

namespace vrnmf {

namespace {

void validate_options(const ApgOptions& opts) {
    if (opts.max_iters < 1 || !(opts.rel_tol > 0.0)) {
        throw ContractError("ApgOptions: max_iters must be >= 1 and rel_tol > 0");
    }
}

// Columns [begin, end) of min 1/2 h^T G h - b^T h over the simplex, warm
// started from h. Size R is fixed for small ranks so the inner loop runs on
// stack vectors; R = Eigen::Dynamic handles the rest with the same steps.
template <int R>
void solve_columns(const DenseMatrix& gram_in, const DenseMatrix& wtx, double lipschitz, DenseMatrix& h,
                   Eigen::Index begin, Eigen::Index end, const ApgOptions& opts) {
    using Vec = Eigen::Matrix<double, R, 1>;
    using Mat = Eigen::Matrix<double, R, R>;
    const Mat gram = gram_in;
    const Eigen::Index r = gram_in.rows();
    std::vector<double> scratch;
    Vec b(r);
    Vec column(r);
    Vec gy(r);
    auto grad = [&](const Vec& y, Vec& g) { g.noalias() = gram * y - b; };
    auto objective = [&](const Vec& y) {
        gy.noalias() = gram * y;
        return 0.5 * y.dot(gy) - b.dot(y);
    };
    auto project = [&](Vec& y) { project_simplex_inplace(y, scratch); };
    for (Eigen::Index j = begin; j < end; ++j) {
        b = wtx.col(j);
        column = h.col(j).cwiseMax(0.0);
        project_simplex_inplace(column, scratch);
        apg_minimize(column, lipschitz, grad, objective, project, opts);
        h.col(j) = column;
    }
}

void solve_columns_any(const DenseMatrix& gram, const DenseMatrix& wtx, double lipschitz, DenseMatrix& h,
                       Eigen::Index begin, Eigen::Index end, const ApgOptions& opts) {
    switch (gram.rows()) {
        case 1: return solve_columns<1>(gram, wtx, lipschitz, h, begin, end, opts);
        case 2: return solve_columns<2>(gram, wtx, lipschitz, h, begin, end, opts);
        case 3: return solve_columns<3>(gram, wtx, lipschitz, h, begin, end, opts);
        case 4: return solve_columns<4>(gram, wtx, lipschitz, h, begin, end, opts);
        case 5: return solve_columns<5>(gram, wtx, lipschitz, h, begin, end, opts);
        case 6: return solve_columns<6>(gram, wtx, lipschitz, h, begin, end, opts);
        case 7: return solve_columns<7>(gram, wtx, lipschitz, h, begin, end, opts);
        case 8: return solve_columns<8>(gram, wtx, lipschitz, h, begin, end, opts);
        default: return solve_columns<Eigen::Dynamic>(gram, wtx, lipschitz, h, begin, end, opts);
    }
}

}  // namespace

bool in_unit_simplex(const Eigen::Ref<const Vector>& h, double slack) {
    return h.allFinite() && (h.size() == 0 || h.minCoeff() >= -slack) && h.sum() <= 1.0 + slack;
}

Vector solve_h_column(const DenseMatrix& w, const Vector& x_col, const Vector& h0, const ApgOptions& opts) {
    validate_options(opts);
    if (x_col.size() != w.rows() || h0.size() != w.cols()) {
        throw DimensionError("solve_h_column: expected W (m x r), x (m), h0 (r)");
    }
    require_finite(w, "solve_h_column W");
    if (!x_col.allFinite()) {
        throw DimensionError("solve_h_column: x contains NaN or Inf");
    }
    if (!in_unit_simplex(h0)) {
        throw ContractError("solve_h_column: h0 is outside the unit simplex");
    }
    const DenseMatrix gram = w.transpose() * w;
    DenseMatrix b(w.cols(), 1);
    b.col(0).noalias() = w.transpose() * x_col;
    DenseMatrix h = h0;
    solve_columns_any(gram, b, spectral_norm_sq(gram), h, 0, 1, opts);
    return h.col(0);
}

DenseMatrix solve_h_from_gram(const DenseMatrix& wtw, const DenseMatrix& wtx, const DenseMatrix& h0,
                              const ApgOptions& opts, int threads) {
    validate_options(opts);
    const Eigen::Index r = wtw.rows();
    if (wtw.cols() != r || wtx.rows() != r || h0.rows() != r || h0.cols() != wtx.cols()) {
        throw DimensionError("solve_h: W^T W (r x r), W^T X (r x n) and H0 (r x n) do not conform");
    }
    for (Eigen::Index j = 0; j < h0.cols(); ++j) {
        if (!in_unit_simplex(h0.col(j))) {
            throw ContractError("solve_h: column " + std::to_string(j) + " of H0 is outside the unit simplex");
        }
    }
    const double lipschitz = spectral_norm_sq(wtw);
    DenseMatrix h = h0;
    parallel_for_chunks(static_cast<std::size_t>(h.cols()), threads, [&](std::size_t begin, std::size_t end) {
        solve_columns_any(wtw, wtx, lipschitz, h, static_cast<Eigen::Index>(begin), static_cast<Eigen::Index>(end),
                          opts);
    });
    return h;
}

DenseMatrix solve_h(const DenseMatrix& w, const DenseMatrix& x, const DenseMatrix& h0, const ApgOptions& opts,
                    int threads) {
    if (x.rows() != w.rows() || h0.rows() != w.cols() || h0.cols() != x.cols()) {
        throw DimensionError("solve_h: expected W (m x r), X (m x n), H0 (r x n)");
    }
    require_finite(w, "solve_h W");
    require_finite(x, "solve_h X");
    const DenseMatrix wtw = w.transpose() * w;
    // Column-by-column products through an aligned copy, so each column of
    // W^T X is bitwise independent of its position in X.
    DenseMatrix wtx(w.cols(), x.cols());
    Vector x_col(x.rows());
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
        x_col = x.col(j);
        wtx.col(j).noalias() = w.transpose() * x_col;
    }
    return solve_h_from_gram(wtw, wtx, h0, opts, threads);
}

}  // namespace vrnmf
