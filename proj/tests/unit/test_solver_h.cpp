#include <gtest/gtest.h>

#include "test_support.hpp"
#include "vrnmf/solver_h.hpp"

namespace vrnmf {
namespace {

using testing::gaussian_matrix;
using testing::simplex_columns;
using testing::uniform_matrix;

double column_objective(const DenseMatrix& w, const Vector& x, const Vector& h) {
    return 0.5 * (x - w * h).squaredNorm();
}

TEST(SolveHColumn, InteriorMinimizer) {
    const Vector h = solve_h_column(DenseMatrix::Identity(2, 2), Vector{{0.3, 0.4}}, Vector::Zero(2));
    EXPECT_NEAR(h[0], 0.3, 1e-10);
    EXPECT_NEAR(h[1], 0.4, 1e-10);
}

TEST(SolveHColumn, ClippedBySumConstraint) {
    const DenseMatrix w = DenseMatrix::Identity(2, 2);
    const Vector x{{2.0, 0.0}};
    // Grid oracle over the simplex at spacing 1e-3.
    double best = std::numeric_limits<double>::infinity();
    Vector arg(2);
    for (int i = 0; i <= 1000; ++i) {
        for (int j = 0; i + j <= 1000; ++j) {
            const Vector v{{i * 1e-3, j * 1e-3}};
            const double f = column_objective(w, x, v);
            if (f < best) {
                best = f;
                arg = v;
            }
        }
    }
    EXPECT_NEAR(arg[0], 1.0, 1e-12);
    EXPECT_NEAR(arg[1], 0.0, 1e-12);
    const Vector h = solve_h_column(w, x, Vector::Zero(2));
    EXPECT_NEAR(h[0], 1.0, 1e-10);
    EXPECT_NEAR(h[1], 0.0, 1e-10);
}

TEST(SolveHColumn, NegativeDataGivesOrigin) {
    const Vector h = solve_h_column(DenseMatrix::Identity(2, 2), Vector{{-1.0, -1.0}}, Vector{{0.5, 0.5}});
    EXPECT_NEAR(h.norm(), 0.0, 1e-12);
}

TEST(SolveHColumn, InfeasibleStartRejected) {
    EXPECT_THROW(solve_h_column(DenseMatrix::Identity(2, 2), Vector{{0.1, 0.1}}, Vector{{0.9, 0.9}}), ContractError);
    EXPECT_THROW(solve_h_column(DenseMatrix::Identity(2, 2), Vector{{0.1, 0.1}}, Vector{{-0.1, 0.1}}), ContractError);
}

TEST(SolveHColumn, MatchesClosedFormOnInteriorInstances) {
    Rng rng(31);
    for (int trial = 0; trial < 100; ++trial) {
        const Eigen::Index r = testing::uniform_int(rng, 2, 6);
        const Eigen::Index m = r + testing::uniform_int(rng, 2, 20);
        const DenseMatrix w = uniform_matrix(rng, m, r) + DenseMatrix::Identity(m, r);
        const Vector target = 0.9 * testing::simplex_point(rng, r);
        const Vector x = w * target;
        const Vector closed = (w.transpose() * w).ldlt().solve(w.transpose() * x);
        const Vector h = solve_h_column(w, x, Vector::Zero(r));
        EXPECT_LE((h - closed).lpNorm<Eigen::Infinity>(), 1e-6) << "trial " << trial;
    }
}

TEST(SolveHColumn, NeverWorseThanStart) {
    Rng rng(32);
    for (int trial = 0; trial < 100; ++trial) {
        const DenseMatrix w = uniform_matrix(rng, 8, 4);
        const Vector x = gaussian_matrix(rng, 8, 1).col(0);
        const Vector h0 = testing::simplex_point(rng, 4);
        ApgOptions opts;
        opts.max_iters = testing::uniform_int(rng, 1, 20);
        const Vector h = solve_h_column(w, x, h0, opts);
        EXPECT_TRUE(in_unit_simplex(h, 1e-12));
        EXPECT_LE(column_objective(w, x, h), column_objective(w, x, h0) + 1e-14);
    }
}

TEST(SolveH, SingleColumnMatchesColumnSolver) {
    Rng rng(33);
    const DenseMatrix w = uniform_matrix(rng, 6, 3);
    const DenseMatrix x = uniform_matrix(rng, 6, 1);
    const DenseMatrix h = solve_h(w, x, DenseMatrix::Zero(3, 1));
    EXPECT_EQ(Vector(h.col(0)), solve_h_column(w, x.col(0), Vector::Zero(3)));
}

TEST(SolveH, RecoversInteriorAbundances) {
    Rng rng(34);
    const DenseMatrix w = uniform_matrix(rng, 20, 4) + DenseMatrix::Identity(20, 4);
    const DenseMatrix h_star = 0.95 * simplex_columns(rng, 4, 60);
    const DenseMatrix x = w * h_star;
    const DenseMatrix oracle = (w.transpose() * w).ldlt().solve(w.transpose() * x);
    const DenseMatrix h = solve_h(w, x, DenseMatrix::Zero(4, 60));
    for (Eigen::Index j = 0; j < 60; ++j) {
        EXPECT_LE((h.col(j) - h_star.col(j)).lpNorm<Eigen::Infinity>(), 1e-6);
        EXPECT_LE((h.col(j) - oracle.col(j)).lpNorm<Eigen::Infinity>(), 1e-6);
    }
}

TEST(SolveH, ColumnPermutationCommutes) {
    Rng rng(35);
    const DenseMatrix w = uniform_matrix(rng, 10, 3);
    const DenseMatrix x = uniform_matrix(rng, 10, 30);
    Eigen::PermutationMatrix<Eigen::Dynamic> perm(30);
    perm.setIdentity();
    std::shuffle(perm.indices().data(), perm.indices().data() + 30, rng.engine());
    const DenseMatrix h = solve_h(w, x, DenseMatrix::Zero(3, 30));
    const DenseMatrix hp = solve_h(w, x * perm, DenseMatrix::Zero(3, 30));
    EXPECT_EQ(hp, h * perm);
}

TEST(SolveH, ParallelMatchesSequential) {
    Rng rng(36);
    const DenseMatrix w = uniform_matrix(rng, 12, 5);
    const DenseMatrix x = uniform_matrix(rng, 12, 301);
    const DenseMatrix h0 = simplex_columns(rng, 5, 301);
    const DenseMatrix seq = solve_h(w, x, h0, {}, 1);
    const DenseMatrix par = solve_h(w, x, h0, {}, 4);
    EXPECT_LE((seq - par).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(SolveH, OutputColumnsInSimplex) {
    Rng rng(37);
    const DenseMatrix w = uniform_matrix(rng, 7, 4);
    const DenseMatrix x = 3.0 * uniform_matrix(rng, 7, 100);
    const DenseMatrix h = solve_h(w, x, DenseMatrix::Zero(4, 100));
    for (Eigen::Index j = 0; j < h.cols(); ++j) EXPECT_TRUE(in_unit_simplex(h.col(j), 1e-12));
}

TEST(SolveH, DimensionMismatchRejected) {
    EXPECT_THROW(solve_h(DenseMatrix::Ones(4, 2), DenseMatrix::Ones(3, 5), DenseMatrix::Zero(2, 5)), DimensionError);
    EXPECT_THROW(solve_h(DenseMatrix::Ones(4, 2), DenseMatrix::Ones(4, 5), DenseMatrix::Zero(2, 4)), DimensionError);
}

}  // namespace
}  // namespace vrnmf
