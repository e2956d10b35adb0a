#pragma once

#include <optional>
#include <vector>

#include "sparseboot/types.hpp"

namespace sparseboot {

// K (A_j, y_j) pairs sharing the column count n.
struct JointProblem {
    std::vector<Matrix> A;
    std::vector<Vector> y;

    std::size_t K() const noexcept { return A.size(); }
    Eigen::Index n() const noexcept { return A.empty() ? 0 : A.front().cols(); }
    void validate() const;
};

struct SolverConfig {
    double lambda = 1.0;
    double rho = 1.0;
    int max_iter = 2000;
    double eps_abs = 1e-6;
    double eps_rel = 1e-4;

    void validate() const;
};

// Initial consensus variable Z and scaled dual U, both n x K.
struct WarmStart {
    Matrix Z;
    Matrix U;
};

struct SolveReport {
    Matrix X;  // n x K, row-sparse (block soft-threshold output)
    Matrix U;  // final scaled dual; feed back through warm_start()
    int iterations = 0;
    double primal_residual = 0.0;
    double dual_residual = 0.0;
    double objective = 0.0;
    bool converged = false;

    WarmStart warm_start() const { return {X, U}; }
};

/// lambda*||X||_{1,2} + 1/2 sum_j ||y_j - A_j x_j||^2.
double joint_objective(const JointProblem& prob, const Matrix& X, double lambda);

/// Row-wise block soft-threshold: each row v_i -> max(0, 1 - t/||v_i||) v_i.
Matrix block_soft_threshold(const Matrix& V, double threshold);

/// ADMM for the row-sparse joint objective with consensus split X = Z.
/// Throws NumericalDivergence when an iterate becomes non-finite.
SolveReport admm_group_lasso(const JointProblem& prob, const SolverConfig& cfg,
                             const std::optional<WarmStart>& warm = std::nullopt);

/// Plain LASSO; delegates to admm_group_lasso with K = 1.
SolveReport admm_lasso(const Matrix& A, const Vector& y, const SolverConfig& cfg,
                       const std::optional<WarmStart>& warm = std::nullopt);

/// Minimum-norm least squares restricted to the columns in S; zero elsewhere.
Vector least_squares_on_support(const Matrix& A, const Vector& y, const IndexSet& S);

}  // namespace sparseboot
