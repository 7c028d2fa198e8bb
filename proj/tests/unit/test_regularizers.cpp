#include <gtest/gtest.h>

#include <cmath>

#include "test_support.hpp"
#include "vrnmf/regularizers.hpp"

namespace vrnmf {
namespace {

using testing::gaussian_matrix;
using testing::uniform_matrix;

Vector singular_values(const DenseMatrix& w) { return Eigen::JacobiSVD<DenseMatrix>(w).singularValues(); }

TEST(EvalVolume, DetOfIdentities) {
    EXPECT_DOUBLE_EQ(eval_volume(DenseMatrix::Identity(3, 3), RegularizerKind::det()), 0.5);
    EXPECT_DOUBLE_EQ(eval_volume(2.0 * DenseMatrix::Identity(2, 2), RegularizerKind::det()), 8.0);
}

TEST(EvalVolume, LogDetOfIdentity) {
    EXPECT_NEAR(eval_volume(DenseMatrix::Identity(2, 2), RegularizerKind::logdet(1.0)), std::log(2.0), 1e-15);
}

TEST(EvalVolume, LogDetNeedsDelta) {
    EXPECT_THROW(eval_volume(DenseMatrix::Identity(2, 2), RegularizerKind::logdet()), ContractError);
    EXPECT_THROW(RegularizerKind::logdet(0.0).validate(), ContractError);
}

TEST(EvalVolume, SingularDetIsZero) {
    DenseMatrix w(3, 2);
    w.col(0) << 1, 2, 3;
    w.col(1) = w.col(0);
    EXPECT_EQ(eval_volume(w, RegularizerKind::det()), 0.0);
}

TEST(EvalVolume, MatchesSvdOracle) {
    Rng rng(11);
    for (int trial = 0; trial < 100; ++trial) {
        const Eigen::Index m = trial == 0 ? 8 : testing::uniform_int(rng, 2, 12);
        const Eigen::Index r = trial == 0 ? 3 : testing::uniform_int(rng, 1, static_cast<int>(m));
        const DenseMatrix w = uniform_matrix(rng, m, r);
        const Vector s = singular_values(w);
        const double det_oracle = 0.5 * s.array().square().prod();
        const double nuc_oracle = s.sum();
        EXPECT_NEAR(eval_volume(w, RegularizerKind::det()), det_oracle, 1e-8 * det_oracle);
        EXPECT_NEAR(eval_volume(w, RegularizerKind::nuclear()), nuc_oracle, 1e-8 * nuc_oracle);
        if (trial == 0) EXPECT_NEAR(eval_volume(w, RegularizerKind::nuclear()), nuc_oracle, 1e-10);
        const double delta = 0.01;
        const double logdet_oracle = 0.5 * (s.array().square() + delta).log().sum();
        EXPECT_NEAR(eval_volume(w, RegularizerKind::logdet(delta)), logdet_oracle,
                    1e-8 * std::max(1.0, std::abs(logdet_oracle)));
    }
}

TEST(EvalVolume, ColumnPermutationInvariant) {
    Rng rng(12);
    for (int trial = 0; trial < 50; ++trial) {
        const DenseMatrix w = uniform_matrix(rng, 7, 4);
        Eigen::PermutationMatrix<Eigen::Dynamic> perm(4);
        perm.setIdentity();
        std::shuffle(perm.indices().data(), perm.indices().data() + 4, rng.engine());
        const DenseMatrix wp = w * perm;
        for (const auto& kind : {RegularizerKind::det(), RegularizerKind::logdet(1e-3), RegularizerKind::nuclear()}) {
            const double a = eval_volume(w, kind);
            EXPECT_NEAR(eval_volume(wp, kind), a, 1e-12 * std::max(1.0, std::abs(a)));
        }
    }
}

TEST(EvalVolume, NuclearHomogeneous) {
    Rng rng(13);
    for (int trial = 0; trial < 50; ++trial) {
        const DenseMatrix w = uniform_matrix(rng, 6, 3);
        const double c = testing::uniform_real(rng, 0.01, 10.0);
        const double v = eval_volume(w, RegularizerKind::nuclear());
        EXPECT_NEAR(eval_volume(c * w, RegularizerKind::nuclear()), c * v, 1e-12 * c * v);
    }
}

TEST(EvalVolume, LogDetMonotoneInDelta) {
    Rng rng(14);
    for (int trial = 0; trial < 50; ++trial) {
        const DenseMatrix w = uniform_matrix(rng, 6, 3);
        double previous = -std::numeric_limits<double>::infinity();
        for (const double delta : {1e-10, 1e-6, 1e-3, 0.1, 1.0, 10.0}) {
            const double v = eval_volume(w, RegularizerKind::logdet(delta));
            EXPECT_GE(v, previous);
            previous = v;
        }
    }
}

TEST(EvalObjective, ExactFactorizationHasZeroFit) {
    Rng rng(21);
    const DenseMatrix w = uniform_matrix(rng, 10, 4);
    const DenseMatrix h = uniform_matrix(rng, 4, 50);
    const ObjectiveValue v = eval_objective(w * h, w, h, 0.0, RegularizerKind::det());
    EXPECT_NEAR(v.fit, 0.0, 1e-10);
    EXPECT_NEAR(v.total, 0.0, 1e-10);
}

TEST(EvalObjective, ZeroLambdaTotalIsFit) {
    Rng rng(22);
    const DenseMatrix w = uniform_matrix(rng, 10, 4);
    const DenseMatrix h = uniform_matrix(rng, 4, 50);
    const DenseMatrix x = uniform_matrix(rng, 10, 50);
    const ObjectiveValue v = eval_objective(x, w, h, 0.0, RegularizerKind::nuclear());
    EXPECT_EQ(v.total, v.fit);
}

TEST(EvalObjective, FitMatchesNaiveEvaluation) {
    Rng rng(23);
    for (int trial = 0; trial < 20; ++trial) {
        const DenseMatrix w = uniform_matrix(rng, 10, 4);
        const DenseMatrix h = uniform_matrix(rng, 4, 50);
        const DenseMatrix x = w * h + 0.1 * gaussian_matrix(rng, 10, 50);
        const double naive = 0.5 * (x - w * h).squaredNorm();
        const ObjectiveValue v = eval_objective(x, w, h, 0.3, RegularizerKind::det());
        EXPECT_NEAR(v.fit, naive, 1e-9 * naive);
        EXPECT_EQ(v.total, v.fit + v.lambda * v.volume);
        EXPECT_EQ(v.lambda, 0.3);
    }
}

TEST(EvalObjective, DimensionMismatchRejected) {
    EXPECT_THROW(eval_objective(DenseMatrix::Ones(3, 4), DenseMatrix::Ones(3, 2), DenseMatrix::Ones(3, 4), 0.0,
                                RegularizerKind::det()),
                 DimensionError);
}

TEST(Regularizer, ParseNames) {
    EXPECT_EQ(parse_regularizer("det"), RegularizerTag::Det);
    EXPECT_EQ(parse_regularizer("LogDet"), RegularizerTag::LogDet);
    EXPECT_EQ(parse_regularizer("NUCLEAR"), RegularizerTag::Nuclear);
    EXPECT_THROW(parse_regularizer("trace"), ContractError);
}

TEST(Regularizer, DefaultDeltaIsRelativeToGram) {
    DenseMatrix w = DenseMatrix::Identity(4, 2) * 3.0;
    EXPECT_DOUBLE_EQ(default_logdet_delta(w), 1e-8 * 18.0 / 2.0);
}

}  // namespace
}  // namespace vrnmf
