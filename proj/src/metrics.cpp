#include "vrnmf/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace vrnmf {

double mrsa_pair(const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Vector>& y) {
    if (x.size() != y.size() || x.size() == 0) {
        throw DimensionError("mrsa_pair: vectors must be nonempty and of equal length");
    }
    if (!x.allFinite() || !y.allFinite()) {
        throw DimensionError("mrsa_pair: vectors contain NaN or Inf");
    }
    const Vector a = x.array() - x.mean();
    const Vector b = y.array() - y.mean();
    const double na = a.norm();
    const double nb = b.norm();
    if (!(na > 0.0) || !(nb > 0.0)) {
        throw UndefinedError("mrsa_pair: spectral angle of a constant vector is undefined");
    }
    // angle = 2 atan2(|a^ - b^|, |a^ + b^|) equals acos of the clamped cosine
    // but stays accurate near 0 and pi.
    const Vector ua = a / na;
    const Vector ub = b / nb;
    const double angle = 2.0 * std::atan2((ua - ub).norm(), (ua + ub).norm());
    return std::clamp(100.0 / std::numbers::pi * angle, 0.0, 100.0);
}

std::vector<Eigen::Index> solve_assignment(const DenseMatrix& cost) {
    const Eigen::Index n = cost.rows();
    if (cost.cols() != n) {
        throw DimensionError("solve_assignment: cost matrix must be square");
    }
    if (n == 0) return {};
    // Shortest augmenting path with row/column potentials, 1-based internally.
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<Eigen::Index> match(n + 1, 0), way(n + 1, 0);
    for (Eigen::Index row = 1; row <= n; ++row) {
        match[0] = row;
        Eigen::Index col0 = 0;
        std::vector<double> minv(n + 1, inf);
        std::vector<char> used(n + 1, 0);
        do {
            used[col0] = 1;
            const Eigen::Index row0 = match[col0];
            double delta = inf;
            Eigen::Index col1 = 0;
            for (Eigen::Index col = 1; col <= n; ++col) {
                if (used[col]) continue;
                const double reduced = cost(row0 - 1, col - 1) - u[row0] - v[col];
                if (reduced < minv[col]) {
                    minv[col] = reduced;
                    way[col] = col0;
                }
                if (minv[col] < delta) {
                    delta = minv[col];
                    col1 = col;
                }
            }
            for (Eigen::Index col = 0; col <= n; ++col) {
                if (used[col]) {
                    u[match[col]] += delta;
                    v[col] -= delta;
                } else {
                    minv[col] -= delta;
                }
            }
            col0 = col1;
        } while (match[col0] != 0);
        do {
            const Eigen::Index col1 = way[col0];
            match[col0] = match[col1];
            col0 = col1;
        } while (col0 != 0);
    }
    std::vector<Eigen::Index> assignment(n, 0);
    for (Eigen::Index col = 1; col <= n; ++col) {
        assignment[match[col] - 1] = col - 1;
    }
    return assignment;
}

MatchedScore mrsa_matched(const DenseMatrix& w, const DenseMatrix& w_true) {
    if (w.rows() != w_true.rows() || w.cols() != w_true.cols() || w.cols() == 0) {
        throw DimensionError("mrsa_matched: estimate is " + std::to_string(w.rows()) + "x" +
                             std::to_string(w.cols()) + ", reference is " + std::to_string(w_true.rows()) + "x" +
                             std::to_string(w_true.cols()));
    }
    const Eigen::Index r = w.cols();
    DenseMatrix cost(r, r);
    for (Eigen::Index i = 0; i < r; ++i) {
        for (Eigen::Index j = 0; j < r; ++j) {
            try {
                cost(i, j) = mrsa_pair(w_true.col(i), w.col(j));
            } catch (const UndefinedError&) {
                const bool ref_constant = (w_true.col(i).array() == w_true(0, i)).all();
                throw UndefinedError(std::string("mrsa_matched: column ") + std::to_string(ref_constant ? i : j) +
                                     (ref_constant ? " of the reference" : " of the estimate") + " is constant");
            }
        }
    }
    MatchedScore out;
    out.permutation = solve_assignment(cost);
    double total = 0.0;
    for (Eigen::Index i = 0; i < r; ++i) {
        const double s = cost(i, out.permutation[static_cast<std::size_t>(i)]);
        out.pair_scores.push_back(s);
        total += s;
    }
    out.score = total / static_cast<double>(r);
    return out;
}

std::vector<std::pair<double, double>> recovery_curve(const std::vector<double>& scores,
                                                      const std::vector<double>& thresholds) {
    if (scores.empty()) {
        throw DimensionError("recovery_curve: no scores");
    }
    if (!std::is_sorted(thresholds.begin(), thresholds.end())) {
        throw ContractError("recovery_curve: thresholds must be sorted ascending");
    }
    std::vector<double> sorted = scores;
    std::sort(sorted.begin(), sorted.end());
    std::vector<std::pair<double, double>> curve;
    curve.reserve(thresholds.size());
    const double count = static_cast<double>(sorted.size());
    for (const double t : thresholds) {
        const auto below = std::lower_bound(sorted.begin(), sorted.end(), t) - sorted.begin();
        curve.emplace_back(t, static_cast<double>(below) / count);
    }
    return curve;
}

LabelGrid segmentation_map(const DenseMatrix& h, Eigen::Index width, Eigen::Index height) {
    if (width < 1 || height < 1 || h.cols() != width * height) {
        throw DimensionError("segmentation_map: H has " + std::to_string(h.cols()) + " columns, expected " +
                             std::to_string(width) + " x " + std::to_string(height));
    }
    if (h.rows() == 0) {
        throw DimensionError("segmentation_map: H has no rows");
    }
    LabelGrid labels(height, width);
    for (Eigen::Index j = 0; j < h.cols(); ++j) {
        Eigen::Index best = 0;
        for (Eigen::Index k = 1; k < h.rows(); ++k) {
            if (h(k, j) > h(best, j)) best = k;
        }
        labels(j / width, j % width) = static_cast<int>(best + 1);
    }
    return labels;
}

}  // namespace vrnmf
