#include "sparseboot/solver.hpp"

#include <cmath>
#include <string>

#include "sparseboot/errors.hpp"
#include "sparseboot/linalg.hpp"

namespace sparseboot {

namespace {

// Applies (A^T A + rho I)^{-1}. When A is wide the L x L system
// (rho I + A A^T) is factored instead, via the matrix-inversion identity.
class RidgeSolve {
public:
    RidgeSolve(const Matrix& A, double rho) : A_(A), rho_(rho), wide_(A.rows() < A.cols()) {
        if (wide_) {
            Matrix small = A * A.transpose();
            small.diagonal().array() += rho;
            llt_.compute(small);
        } else {
            Matrix gram = A.transpose() * A;
            gram.diagonal().array() += rho;
            llt_.compute(gram);
        }
    }

    Vector solve(const Vector& rhs) const {
        if (!wide_) return llt_.solve(rhs);
        const Vector inner = llt_.solve(A_ * rhs);
        return (rhs - A_.transpose() * inner) / rho_;
    }

private:
    const Matrix& A_;
    double rho_;
    bool wide_;
    Eigen::LLT<Matrix> llt_;
};

}  // namespace

void JointProblem::validate() const {
    if (A.empty()) throw ParameterError("joint problem needs K >= 1 pairs");
    if (A.size() != y.size()) throw ParameterError("joint problem: A and y counts differ");
    const auto cols = A.front().cols();
    if (cols < 1) throw ParameterError("joint problem: n must be >= 1");
    for (std::size_t j = 0; j < A.size(); ++j) {
        if (A[j].cols() != cols) {
            throw ParameterError("joint problem: A_" + std::to_string(j) +
                                 " has a different column count");
        }
        if (A[j].rows() != y[j].size() || A[j].rows() < 1) {
            throw ParameterError("joint problem: rows(A_" + std::to_string(j) +
                                 ") != len(y_" + std::to_string(j) + ")");
        }
    }
}

void SolverConfig::validate() const {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ParameterError("lambda must be >= 0");
    if (!(rho > 0.0) || !std::isfinite(rho)) throw ParameterError("rho must be > 0");
    if (max_iter < 1) throw ParameterError("max_iter must be >= 1");
    if (!(eps_abs > 0.0) || !(eps_rel > 0.0)) throw ParameterError("tolerances must be > 0");
}

double joint_objective(const JointProblem& prob, const Matrix& X, double lambda) {
    double fit = 0.0;
    for (std::size_t j = 0; j < prob.K(); ++j) {
        const auto c = static_cast<Eigen::Index>(j);
        fit += (prob.y[j] - prob.A[j] * X.col(c)).squaredNorm();
    }
    return lambda * mixed_norm(X, 1.0, 2.0) + 0.5 * fit;
}

Matrix block_soft_threshold(const Matrix& V, double threshold) {
    Matrix out = Matrix::Zero(V.rows(), V.cols());
    for (Eigen::Index i = 0; i < V.rows(); ++i) {
        const double norm = V.row(i).norm();
        if (norm > threshold) out.row(i) = (1.0 - threshold / norm) * V.row(i);
    }
    return out;
}

SolveReport admm_group_lasso(const JointProblem& prob, const SolverConfig& cfg,
                             const std::optional<WarmStart>& warm) {
    prob.validate();
    cfg.validate();
    const Eigen::Index n = prob.n();
    const auto K = static_cast<Eigen::Index>(prob.K());

    Matrix Z = Matrix::Zero(n, K);
    Matrix U = Matrix::Zero(n, K);
    if (warm) {
        if (warm->Z.rows() != n || warm->Z.cols() != K || warm->U.rows() != n ||
            warm->U.cols() != K) {
            throw ParameterError("warm start shape does not match the problem");
        }
        Z = warm->Z;
        U = warm->U;
    }

    std::vector<RidgeSolve> factors;
    factors.reserve(prob.K());
    Matrix Aty(n, K);
    for (Eigen::Index j = 0; j < K; ++j) {
        factors.emplace_back(prob.A[static_cast<std::size_t>(j)], cfg.rho);
        Aty.col(j) = prob.A[static_cast<std::size_t>(j)].transpose() *
                     prob.y[static_cast<std::size_t>(j)];
    }

    const double threshold = cfg.lambda / cfg.rho;
    const double sqrt_dim = std::sqrt(static_cast<double>(n * K));
    Matrix X(n, K);
    SolveReport report;

    for (int it = 1; it <= cfg.max_iter; ++it) {
        for (Eigen::Index j = 0; j < K; ++j) {
            X.col(j) = factors[static_cast<std::size_t>(j)].solve(
                Aty.col(j) + cfg.rho * (Z.col(j) - U.col(j)));
        }
        const Matrix Z_old = Z;
        Z = block_soft_threshold(X + U, threshold);
        U += X - Z;

        if (!X.allFinite() || !Z.allFinite() || !U.allFinite()) {
            throw NumericalDivergence(it, "ADMM iterate became non-finite at iteration " +
                                              std::to_string(it));
        }

        report.iterations = it;
        report.primal_residual = (X - Z).norm();
        report.dual_residual = cfg.rho * (Z - Z_old).norm();
        const double eps_pri = sqrt_dim * cfg.eps_abs + cfg.eps_rel * std::max(X.norm(), Z.norm());
        const double eps_dual = sqrt_dim * cfg.eps_abs + cfg.eps_rel * cfg.rho * U.norm();
        if (report.primal_residual <= eps_pri && report.dual_residual <= eps_dual) {
            report.converged = true;
            break;
        }
    }

    report.objective = joint_objective(prob, Z, cfg.lambda);
    if (!std::isfinite(report.objective)) {
        throw NumericalDivergence(report.iterations, "objective is non-finite");
    }
    report.X = std::move(Z);
    report.U = std::move(U);
    return report;
}

SolveReport admm_lasso(const Matrix& A, const Vector& y, const SolverConfig& cfg,
                       const std::optional<WarmStart>& warm) {
    JointProblem prob;
    prob.A.push_back(A);
    prob.y.push_back(y);
    return admm_group_lasso(prob, cfg, warm);
}

Vector least_squares_on_support(const Matrix& A, const Vector& y, const IndexSet& S) {
    if (A.rows() != y.size()) throw ParameterError("least squares: rows(A) != len(y)");
    Vector x = Vector::Zero(A.cols());
    if (S.empty()) return x;
    Matrix sub(A.rows(), static_cast<Eigen::Index>(S.size()));
    for (std::size_t k = 0; k < S.size(); ++k) {
        if (S[k] >= static_cast<std::size_t>(A.cols())) {
            throw IndexError("support index " + std::to_string(S[k]) + " out of range");
        }
        sub.col(static_cast<Eigen::Index>(k)) = A.col(static_cast<Eigen::Index>(S[k]));
    }
    const Vector coef = sub.completeOrthogonalDecomposition().solve(y);
    for (std::size_t k = 0; k < S.size(); ++k) {
        x[static_cast<Eigen::Index>(S[k])] = coef[static_cast<Eigen::Index>(k)];
    }
    return x;
}

}  // namespace sparseboot
