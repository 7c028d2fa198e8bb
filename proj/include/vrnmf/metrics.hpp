#pragma once

#include <utility>
#include <vector>

#include "vrnmf/matrix_core.hpp"

namespace vrnmf {

/// Mean removed spectral angle scaled to [0, 100]:
///   (100 / pi) * angle(x - mean(x), y - mean(y)).
/// Throws UndefinedError if either vector is constant.
double mrsa_pair(const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Vector>& y);

struct MatchedScore {
    double score = 0.0;
    /// permutation[i] is the column of the estimate matched to column i of the reference.
    std::vector<Eigen::Index> permutation;
    /// Per-pair MRSA in reference column order.
    std::vector<double> pair_scores;
};

/// Mean MRSA under the column assignment minimizing the total.
MatchedScore mrsa_matched(const DenseMatrix& w, const DenseMatrix& w_true);

/// Minimum-cost perfect assignment on a square cost matrix (Hungarian method).
/// Returns assignment[row] = column.
std::vector<Eigen::Index> solve_assignment(const DenseMatrix& cost);

/// For each threshold t, the fraction of scores strictly below t.
std::vector<std::pair<double, double>> recovery_curve(const std::vector<double>& scores,
                                                      const std::vector<double>& thresholds);

using LabelGrid = Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// height x width grid of 1-indexed labels: argmax of each H column (ties to
/// the lowest index), columns mapped to pixels in row-major order.
LabelGrid segmentation_map(const DenseMatrix& h, Eigen::Index width, Eigen::Index height);

}  // namespace vrnmf
