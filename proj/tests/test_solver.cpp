#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "sparseboot/errors.hpp"
#include "sparseboot/linalg.hpp"
#include "sparseboot/solver.hpp"

using namespace sparseboot;

namespace {

JointProblem random_joint(std::mt19937_64& rng, int K, int L, int n) {
    JointProblem p;
    for (int j = 0; j < K; ++j) {
        p.A.push_back(oracle::random_matrix(rng, L, n));
        p.y.push_back(oracle::random_vector(rng, L));
    }
    return p;
}

// Largest row norm of (A_1^T y_1 | ... | A_K^T y_K): the smallest lambda with
// X = 0 optimal.
double lambda_max(const JointProblem& p) {
    Matrix G(p.n(), static_cast<Eigen::Index>(p.K()));
    for (std::size_t j = 0; j < p.K(); ++j) {
        G.col(static_cast<Eigen::Index>(j)) = p.A[j].transpose() * p.y[j];
    }
    return G.rowwise().norm().maxCoeff();
}

}  // namespace

TEST(BlockSoftThreshold, ShrinksRows) {
    Matrix v(3, 2);
    v << 3, 4, 0.1, 0, 0, -2;
    const Matrix z = block_soft_threshold(v, 1.0);
    EXPECT_NEAR(z(0, 0), 3 * 0.8, 1e-15);
    EXPECT_NEAR(z(0, 1), 4 * 0.8, 1e-15);
    EXPECT_EQ(z.row(1).norm(), 0.0);
    EXPECT_NEAR(z(2, 1), -1.0, 1e-15);
}

TEST(AdmmGroupLasso, ZeroMeasurements) {
    std::mt19937_64 rng(1);
    JointProblem p = random_joint(rng, 3, 5, 8);
    for (auto& y : p.y) y.setZero();
    SolverConfig cfg;
    cfg.lambda = 0.3;
    const auto r = admm_group_lasso(p, cfg);
    EXPECT_TRUE(r.X.isZero(0.0));
    EXPECT_EQ(r.objective, 0.0);
    EXPECT_TRUE(r.converged);
}

TEST(AdmmLasso, IdentitySoftThreshold) {
    Vector y(5);
    y << 3.0, -2.0, 1.5, -4.0, 2.5;
    SolverConfig cfg;
    cfg.lambda = 1.0;
    cfg.eps_abs = 1e-12;
    cfg.eps_rel = 1e-12;
    cfg.max_iter = 10000;
    const auto r = admm_lasso(Matrix::Identity(5, 5), y, cfg);
    for (int i = 0; i < 5; ++i) {
        const double expect = (y[i] > 0 ? 1 : -1) * std::max(std::abs(y[i]) - 1.0, 0.0);
        EXPECT_NEAR(r.X(i, 0), expect, 1e-8);
    }
}

TEST(AdmmGroupLasso, AboveLambdaMaxGivesZero) {
    std::mt19937_64 rng(2);
    const JointProblem p = random_joint(rng, 3, 6, 10);
    const double lmax = lambda_max(p);
    SolverConfig cfg;
    cfg.lambda = lmax * 1.01;
    const auto r = admm_group_lasso(p, cfg);
    EXPECT_TRUE(r.X.isZero(0.0));
    // Subgradient check at X = 0.
    Matrix G(p.n(), 3);
    for (std::size_t j = 0; j < 3; ++j) G.col(Eigen::Index(j)) = p.A[j].transpose() * p.y[j];
    EXPECT_LE(G.rowwise().norm().maxCoeff(), cfg.lambda);
}

TEST(AdmmGroupLasso, MatchesProximalGradientOracle) {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 5; ++trial) {
        const JointProblem p = random_joint(rng, 2, 8, 10);
        SolverConfig cfg;
        cfg.lambda = 0.2 * lambda_max(p);
        const auto r = admm_group_lasso(p, cfg);
        const Matrix ref = oracle::proximal_gradient(p.A, p.y, cfg.lambda);
        const double ref_obj = oracle::group_objective(p.A, p.y, ref, cfg.lambda);
        EXPECT_NEAR(r.objective, ref_obj, 1e-5 * ref_obj);
        EXPECT_NEAR(r.objective, oracle::group_objective(p.A, p.y, r.X, cfg.lambda), 1e-12);
    }
}

TEST(AdmmGroupLasso, InvariantsOnRandomProblems) {
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 10; ++trial) {
        const int K = 1 + trial % 3;
        const JointProblem p = random_joint(rng, K, 4 + trial, 9);
        SolverConfig cfg;
        cfg.lambda = 0.1 * (1 + trial % 4) * lambda_max(p);
        const auto r = admm_group_lasso(p, cfg);

        double zero_obj = 0.0;
        for (const auto& y : p.y) zero_obj += 0.5 * y.squaredNorm();
        EXPECT_LE(r.objective, zero_obj + 1e-9);

        // Shared support: each row is entirely zero or entirely nonzero.
        for (Eigen::Index i = 0; i < r.X.rows(); ++i) {
            const bool any = (r.X.row(i).array() != 0.0).any();
            const bool all = (r.X.row(i).array() != 0.0).all();
            EXPECT_EQ(any, all);
        }
        EXPECT_LE(r.iterations, cfg.max_iter);
        if (r.converged) {
            const double sqrt_dim = std::sqrt(double(r.X.size()));
            EXPECT_LE(r.primal_residual, sqrt_dim * cfg.eps_abs + cfg.eps_rel * r.X.norm() * 2);
        }
    }
}

TEST(AdmmGroupLasso, ScalingCovariance) {
    std::mt19937_64 rng(5);
    JointProblem p = random_joint(rng, 2, 7, 9);
    SolverConfig cfg;
    cfg.lambda = 0.3 * lambda_max(p);
    cfg.eps_abs = 1e-10;
    cfg.eps_rel = 1e-10;
    cfg.max_iter = 50000;
    const auto base = admm_group_lasso(p, cfg);
    const double c = 3.0;
    for (auto& y : p.y) y *= c;
    cfg.lambda *= c;
    const auto scaled = admm_group_lasso(p, cfg);
    EXPECT_LT((scaled.X - c * base.X).norm(), 1e-6 * (1.0 + c * base.X.norm()));
}

TEST(AdmmLasso, DelegatesBitwise) {
    std::mt19937_64 rng(6);
    const Matrix A = oracle::random_matrix(rng, 12, 20);
    const Vector y = oracle::random_vector(rng, 12);
    SolverConfig cfg;
    cfg.lambda = 0.7;
    JointProblem p;
    p.A.push_back(A);
    p.y.push_back(y);
    const auto single = admm_lasso(A, y, cfg);
    const auto joint = admm_group_lasso(p, cfg);
    EXPECT_EQ(single.X, joint.X);
    EXPECT_EQ(single.iterations, joint.iterations);
    EXPECT_EQ(single.objective, joint.objective);
}

TEST(AdmmGroupLasso, WarmStartReachesSameSolution) {
    std::mt19937_64 rng(7);
    const JointProblem p = random_joint(rng, 3, 6, 12);
    SolverConfig cfg;
    cfg.lambda = 0.3 * lambda_max(p);
    const auto cold = admm_group_lasso(p, cfg);
    const auto warm = admm_group_lasso(p, cfg, cold.warm_start());
    EXPECT_LE(warm.iterations, cold.iterations);
    EXPECT_NEAR(warm.objective, cold.objective, 1e-4 * cold.objective);
    EXPECT_THROW(admm_group_lasso(p, cfg, WarmStart{Matrix::Zero(2, 2), Matrix::Zero(2, 2)}),
                 ParameterError);
}

TEST(AdmmGroupLasso, TallAndWideAgree) {
    // Exercises both factorization paths on equivalent data.
    std::mt19937_64 rng(8);
    const Matrix A = oracle::random_matrix(rng, 15, 6);
    const Vector y = oracle::random_vector(rng, 15);
    SolverConfig cfg;
    cfg.lambda = 1.0;
    cfg.eps_abs = 1e-11;
    cfg.eps_rel = 1e-11;
    cfg.max_iter = 20000;
    const auto tall = admm_lasso(A, y, cfg);
    const Matrix ref = oracle::proximal_gradient({A}, {y}, cfg.lambda);
    EXPECT_LT((tall.X - ref).norm(), 1e-6);

    const Matrix W = oracle::random_matrix(rng, 5, 14);
    const Vector yw = oracle::random_vector(rng, 5);
    const auto wide = admm_lasso(W, yw, cfg);
    const Matrix refw = oracle::proximal_gradient({W}, {yw}, cfg.lambda);
    EXPECT_LT((wide.X - refw).norm(), 1e-6);
}

TEST(AdmmGroupLasso, RejectsBadInput) {
    SolverConfig cfg;
    JointProblem empty;
    EXPECT_THROW(admm_group_lasso(empty, cfg), ParameterError);
    JointProblem mismatched;
    mismatched.A.push_back(Matrix::Ones(3, 2));
    mismatched.y.push_back(Vector::Ones(4));
    EXPECT_THROW(admm_group_lasso(mismatched, cfg), ParameterError);
    JointProblem ok;
    ok.A.push_back(Matrix::Ones(3, 2));
    ok.y.push_back(Vector::Ones(3));
    cfg.rho = 0.0;
    EXPECT_THROW(admm_group_lasso(ok, cfg), ParameterError);
}

TEST(AdmmGroupLasso, DivergenceIsReported) {
    JointProblem p;
    p.A.push_back(Matrix::Ones(3, 2));
    Vector y(3);
    y << 1.0, std::numeric_limits<double>::quiet_NaN(), 0.0;
    p.y.push_back(y);
    SolverConfig cfg;
    try {
        admm_group_lasso(p, cfg);
        FAIL() << "expected NumericalDivergence";
    } catch (const NumericalDivergence& e) {
        EXPECT_EQ(e.iteration(), 1);
    }
}

TEST(LeastSquaresOnSupport, Examples) {
    EXPECT_TRUE(least_squares_on_support(Matrix::Identity(3, 3), Vector::Ones(3), {}).isZero(0.0));
    Vector y(3);
    y << 5, 6, 7;
    const Vector x = least_squares_on_support(Matrix::Identity(3, 3), y, {0, 2});
    EXPECT_NEAR(x[0], 5, 1e-14);
    EXPECT_EQ(x[1], 0.0);
    EXPECT_NEAR(x[2], 7, 1e-14);
}

TEST(LeastSquaresOnSupport, MatchesNormalEquations) {
    std::mt19937_64 rng(9);
    const Matrix A = oracle::random_matrix(rng, 20, 8);
    const Vector y = oracle::random_vector(rng, 20);
    const IndexSet S{1, 3, 4};
    const Vector x = least_squares_on_support(A, y, S);
    Matrix sub(20, 3);
    for (int k = 0; k < 3; ++k) sub.col(k) = A.col(Eigen::Index(S[std::size_t(k)]));
    const Vector ref = (sub.transpose() * sub).ldlt().solve(sub.transpose() * y);
    for (int k = 0; k < 3; ++k) EXPECT_NEAR(x[Eigen::Index(S[std::size_t(k)])], ref[k], 1e-10);
    EXPECT_EQ(x[0], 0.0);
    EXPECT_THROW(least_squares_on_support(A, y, {8}), IndexError);
}

TEST(LeastSquaresOnSupport, RankDeficientMinimumNorm) {
    Matrix A(2, 2);
    A << 1, 1, 1, 1;
    Vector y(2);
    y << 2, 2;
    const Vector x = least_squares_on_support(A, y, {0, 1});
    EXPECT_NEAR(x[0], 1.0, 1e-12);
    EXPECT_NEAR(x[1], 1.0, 1e-12);
}
