#include <gtest/gtest.h>

#include <limits>

#include "test_support.hpp"
#include "vrnmf/matrix_core.hpp"

namespace vrnmf {
namespace {

using testing::gaussian_matrix;
using testing::gaussian_vector;
using testing::simplex_point;

// Exact projection by enumerating faces of the simplex: for each support set
// S, project onto {v_S free, v_rest = 0} with the sum constraint either
// inactive or active, keep the feasible candidate closest to h.
Vector projection_by_face_enumeration(const Vector& h) {
    const auto r = h.size();
    Vector best = Vector::Zero(r);
    double best_dist = (h - best).squaredNorm();
    for (unsigned mask = 1; mask < (1u << r); ++mask) {
        for (int active = 0; active < 2; ++active) {
            Vector v = Vector::Zero(r);
            int k = 0;
            double sum_s = 0.0;
            for (Eigen::Index i = 0; i < r; ++i) {
                if (mask & (1u << i)) {
                    ++k;
                    sum_s += h[i];
                }
            }
            const double shift = active ? (sum_s - 1.0) / k : 0.0;
            for (Eigen::Index i = 0; i < r; ++i) {
                if (mask & (1u << i)) v[i] = h[i] - shift;
            }
            if (v.minCoeff() < -1e-15 || v.sum() > 1.0 + 1e-12) continue;
            const double dist = (h - v).squaredNorm();
            if (dist < best_dist) {
                best_dist = dist;
                best = v;
            }
        }
    }
    return best;
}

TEST(ProjectSimplex, InteriorPointUnchanged) {
    const Vector p = project_simplex(Vector{{0.2, 0.3}});
    EXPECT_DOUBLE_EQ(p[0], 0.2);
    EXPECT_DOUBLE_EQ(p[1], 0.3);
}

TEST(ProjectSimplex, NegativeOrthantGoesToOrigin) {
    const Vector p = project_simplex(Vector{{-1.0, -2.0}});
    EXPECT_EQ(p, Vector::Zero(2));
}

TEST(ProjectSimplex, ActiveSumConstraint) {
    // Face-enumeration oracle gives [0.7, 0.3].
    const Vector h{{0.9, 0.5}};
    const Vector oracle = projection_by_face_enumeration(h);
    EXPECT_NEAR(oracle[0], 0.7, 1e-15);
    EXPECT_NEAR(oracle[1], 0.3, 1e-15);
    const Vector p = project_simplex(h);
    EXPECT_NEAR(p[0], 0.7, 1e-12);
    EXPECT_NEAR(p[1], 0.3, 1e-12);
}

TEST(ProjectSimplex, EmptyAndNonFiniteRejected) {
    EXPECT_THROW(project_simplex(Vector()), DimensionError);
    EXPECT_THROW(project_simplex(Vector{{0.1, std::numeric_limits<double>::quiet_NaN()}}), DimensionError);
}

TEST(ProjectSimplex, MatchesFaceEnumerationOracle) {
    Rng rng(101);
    for (int trial = 0; trial < 1000; ++trial) {
        const int r = testing::uniform_int(rng, 1, 5);
        const Vector h = gaussian_vector(rng, r, 1.5);
        const Vector p = project_simplex(h);
        EXPECT_LE((p - projection_by_face_enumeration(h)).lpNorm<Eigen::Infinity>(), 1e-8) << "trial " << trial;
    }
}

TEST(ProjectSimplex, OutputFeasibleAndOptimalAgainstSamples) {
    Rng rng(102);
    for (int trial = 0; trial < 20; ++trial) {
        const Eigen::Index r = testing::uniform_int(rng, 1, 8);
        const Vector h = gaussian_vector(rng, r, 2.0);
        const Vector p = project_simplex(h);
        EXPECT_GE(p.minCoeff(), 0.0);
        EXPECT_LE(p.sum(), 1.0 + 1e-12);
        const double d = (p - h).norm();
        for (int s = 0; s < 1000; ++s) {
            EXPECT_LE(d, (simplex_point(rng, r) - h).norm() + 1e-12);
        }
    }
}

TEST(ProjectSimplex, InplaceMatchesAllocatingVersion) {
    Rng rng(103);
    std::vector<double> scratch;
    for (int trial = 0; trial < 200; ++trial) {
        const Vector h = gaussian_vector(rng, 6);
        Vector v = h;
        project_simplex_inplace(v, scratch);
        EXPECT_EQ(v, project_simplex(h));
    }
}

double prox_objective(const DenseMatrix& z, const DenseMatrix& y, double theta) {
    return 0.5 * (z - y).squaredNorm() + theta * thin_svd(z).sigma.sum();
}

TEST(Svt, DiagonalShrinkage) {
    DenseMatrix y = DenseMatrix::Zero(2, 2);
    y(0, 0) = 3.0;
    y(1, 1) = 1.0;
    const DenseMatrix z = svt(y, 1.0);
    DenseMatrix expected = DenseMatrix::Zero(2, 2);
    expected(0, 0) = 2.0;
    EXPECT_LE((z - expected).norm(), 1e-12);
}

TEST(Svt, ZeroThresholdIsIdentity) {
    Rng rng(201);
    const DenseMatrix y = gaussian_matrix(rng, 6, 3);
    EXPECT_LE((svt(y, 0.0) - y).norm(), 1e-12 * y.norm());
}

TEST(Svt, LargeThresholdAnnihilates) {
    Rng rng(202);
    const DenseMatrix y = gaussian_matrix(rng, 5, 4);
    const double smax = thin_svd(y).sigma[0];
    EXPECT_EQ(svt(y, smax).norm(), 0.0);
    EXPECT_EQ(svt(y, 2.0 * smax).norm(), 0.0);
}

TEST(Svt, NegativeThresholdRejected) {
    EXPECT_THROW(svt(DenseMatrix::Identity(2, 2), -1.0), ContractError);
}

TEST(Svt, BeatsRandomPerturbationsOnProxObjective) {
    Rng rng(203);
    for (int trial = 0; trial < 100; ++trial) {
        const Eigen::Index m = testing::uniform_int(rng, 2, 8);
        const Eigen::Index n = testing::uniform_int(rng, 1, 6);
        const DenseMatrix y = gaussian_matrix(rng, m, n);
        const double theta = testing::uniform_real(rng, 0.0, thin_svd(y).sigma[0]);
        const DenseMatrix z = svt(y, theta);
        const double best = prox_objective(z, y, theta);
        for (int k = 0; k < 100; ++k) {
            DenseMatrix e = gaussian_matrix(rng, m, n);
            e /= e.norm();
            const double step = std::pow(10.0, testing::uniform_real(rng, -3.0, -1.0));
            EXPECT_LE(best, prox_objective(z + step * e, y, theta) + 1e-12);
        }
    }
}

TEST(ThinSvd, OrthonormalFactorsAndSortedValues) {
    Rng rng(301);
    const DenseMatrix y = gaussian_matrix(rng, 9, 4);
    const SvdTriple s = thin_svd(y);
    EXPECT_LE((s.u.transpose() * s.u - DenseMatrix::Identity(4, 4)).norm(), 1e-10);
    EXPECT_LE((s.v.transpose() * s.v - DenseMatrix::Identity(4, 4)).norm(), 1e-10);
    for (Eigen::Index i = 1; i < s.sigma.size(); ++i) EXPECT_GE(s.sigma[i - 1], s.sigma[i]);
    EXPECT_GE(s.sigma.minCoeff(), 0.0);
    EXPECT_LE((s.u * s.sigma.asDiagonal() * s.v.transpose() - y).norm(), 1e-12 * y.norm() * 10);
}

TEST(NullSpaceBasis, ComplementOfCoordinateAxis) {
    const DenseMatrix e1 = DenseMatrix::Identity(3, 3).col(0);
    const DenseMatrix q = null_space_basis(e1);
    ASSERT_EQ(q.rows(), 3);
    ASSERT_EQ(q.cols(), 2);
    DenseMatrix expected = DenseMatrix::Zero(3, 3);
    expected(1, 1) = 1.0;
    expected(2, 2) = 1.0;
    EXPECT_LE((q * q.transpose() - expected).norm(), 1e-12);
}

TEST(NullSpaceBasis, RandomFullRankInputs) {
    Rng rng(302);
    for (int trial = 0; trial < 100; ++trial) {
        const Eigen::Index m = trial == 0 ? 10 : testing::uniform_int(rng, 2, 12);
        const Eigen::Index k = trial == 0 ? 3 : testing::uniform_int(rng, 1, static_cast<int>(m) - 1);
        const DenseMatrix a = gaussian_matrix(rng, m, k);
        const DenseMatrix q = null_space_basis(a);
        ASSERT_EQ(q.cols(), m - k);
        EXPECT_LE((a.transpose() * q).cwiseAbs().maxCoeff(), 1e-10);
        EXPECT_LE((q.transpose() * q - DenseMatrix::Identity(m - k, m - k)).cwiseAbs().maxCoeff(), 1e-10);
    }
}

TEST(NullSpaceBasis, SquareInputRejected) {
    Rng rng(303);
    EXPECT_THROW(null_space_basis(gaussian_matrix(rng, 3, 3)), DegeneracyError);
}

TEST(NullSpaceBasis, RankDeficientInputRejected) {
    DenseMatrix a(4, 2);
    a.col(0) << 1, 2, 3, 4;
    a.col(1) = 2.0 * a.col(0);
    EXPECT_THROW(null_space_basis(a), DegeneracyError);
}

TEST(SpectralNormSq, SmallExactCases) {
    DenseMatrix d = DenseMatrix::Zero(2, 2);
    d(0, 0) = 4.0;
    d(1, 1) = 1.0;
    EXPECT_NEAR(spectral_norm_sq(d), 4.0, 1e-14);
    EXPECT_NEAR(spectral_norm_sq(DenseMatrix::Identity(5, 5)), 1.0, 1e-14);
}

TEST(SpectralNormSq, GramMatchesSvdOracle) {
    Rng rng(401);
    const DenseMatrix h = testing::uniform_matrix(rng, 4, 100);
    const double oracle = std::pow(Eigen::JacobiSVD<DenseMatrix>(h).singularValues()[0], 2);
    EXPECT_NEAR(spectral_norm_sq(h * h.transpose()), oracle, 1e-7 * oracle);
    EXPECT_NEAR(spectral_norm_sq_power(h * h.transpose()), oracle, 1e-7 * oracle);
}

TEST(SpectralNormSq, PowerPathOnLargeMatrix) {
    Rng rng(402);
    const DenseMatrix g = gaussian_matrix(rng, 40, 60);
    const DenseMatrix a = g * g.transpose();
    const double oracle = Eigen::SelfAdjointEigenSolver<DenseMatrix>(a).eigenvalues().maxCoeff();
    EXPECT_NEAR(spectral_norm_sq(a), oracle, 1e-7 * oracle);
    EXPECT_EQ(spectral_norm_sq(a), spectral_norm_sq(a));
}

TEST(SpectralNormSq, NonSymmetricRejected) {
    DenseMatrix a = DenseMatrix::Identity(3, 3);
    a(0, 2) = 0.5;
    EXPECT_THROW(spectral_norm_sq(a), ContractError);
}

}  // namespace
}  // namespace vrnmf
