#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sparseboot/linalg.hpp"
#include "sparseboot/sampling.hpp"
#include "sparseboot/solver.hpp"

namespace sparseboot {

enum class Method { jobs, bagging, bolasso, l1 };

const char* to_string(Method method) noexcept;
Method parse_method(const std::string& name);

struct SensingProblem {
    Matrix A;  // m x n
    Vector y;  // m

    void validate() const;
};

struct RecoveryResult {
    Method method = Method::l1;
    Vector x_hat;
    std::optional<Matrix> per_estimate;  // n x K; absent for l1
    IndexSet support;                    // row_support(x_hat) at the default tolerance
    std::vector<SolveReport> solver_reports;

    int total_iterations() const;
    bool all_converged() const;
};

struct EnsembleOptions {
    // Warm starts: one entry for jobs/l1, K entries for bagging/bolasso.
    std::vector<WarmStart> warm;
    std::size_t threads = 1;  // parallel sub-solves for bagging/bolasso
    double support_tol = kDefaultSupportTol;  // bolasso per-estimate threshold
};

/// One joint solve over all K resampled problems, then the column mean.
RecoveryResult jobs(const SensingProblem& prob, const SamplingPlan& plan,
                    const SolverConfig& cfg, const EnsembleOptions& opts = {});
RecoveryResult jobs(const SensingProblem& prob, const std::vector<IndexMultiset>& subsets,
                    const SolverConfig& cfg, const EnsembleOptions& opts = {});

/// K independent LASSO solves, averaged.
RecoveryResult bagging(const SensingProblem& prob, const SamplingPlan& plan,
                       const SolverConfig& cfg, const EnsembleOptions& opts = {});
RecoveryResult bagging(const SensingProblem& prob, const std::vector<IndexMultiset>& subsets,
                       const SolverConfig& cfg, const EnsembleOptions& opts = {});

/// K independent LASSO solves; least squares on the intersection of supports
/// using the full (A, y).
RecoveryResult bolasso(const SensingProblem& prob, const SamplingPlan& plan,
                       const SolverConfig& cfg, const EnsembleOptions& opts = {});
RecoveryResult bolasso(const SensingProblem& prob, const std::vector<IndexMultiset>& subsets,
                       const SolverConfig& cfg, const EnsembleOptions& opts = {});

/// Single LASSO on the full data.
RecoveryResult l1_min(const SensingProblem& prob, const SolverConfig& cfg,
                      const EnsembleOptions& opts = {});

/// Dispatch on `method`; `subsets` is ignored for l1.
RecoveryResult recover(Method method, const SensingProblem& prob,
                       const std::vector<IndexMultiset>& subsets, const SolverConfig& cfg,
                       const EnsembleOptions& opts = {});

/// Sorted intersection of sorted index sets.
IndexSet intersect_supports(const std::vector<IndexSet>& supports);

}  // namespace sparseboot
