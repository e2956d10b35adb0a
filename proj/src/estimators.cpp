#include "sparseboot/estimators.hpp"

#include <algorithm>
#include <iterator>

#include "sparseboot/errors.hpp"
#include "sparseboot/parallel.hpp"

namespace sparseboot {

namespace {

void check_plan(const SensingProblem& prob, const SamplingPlan& plan) {
    prob.validate();
    if (plan.m != static_cast<std::size_t>(prob.A.rows())) {
        throw ParameterError("sampling plan m (" + std::to_string(plan.m) +
                             ") does not match rows(A) (" + std::to_string(prob.A.rows()) + ")");
    }
}

void check_subsets(const std::vector<IndexMultiset>& subsets) {
    if (subsets.empty()) throw ParameterError("ensemble estimators need K >= 1 subsets");
}

// Column mean with a fixed left-to-right summation order.
Vector column_mean(const Matrix& X) {
    Vector sum = Vector::Zero(X.rows());
    for (Eigen::Index j = 0; j < X.cols(); ++j) sum += X.col(j);
    return sum / static_cast<double>(X.cols());
}

std::optional<WarmStart> warm_at(const EnsembleOptions& opts, std::size_t j) {
    if (j < opts.warm.size()) return opts.warm[j];
    return std::nullopt;
}

// Independent per-subset LASSO solves; column j of the result is subset j.
std::vector<SolveReport> independent_solves(const SensingProblem& prob,
                                            const std::vector<IndexMultiset>& subsets,
                                            const SolverConfig& cfg,
                                            const EnsembleOptions& opts) {
    std::vector<SolveReport> reports(subsets.size());
    parallel_for(subsets.size(), opts.threads, [&](std::size_t j) {
        reports[j] = admm_lasso(select_rows(prob.A, subsets[j]), select_rows(prob.y, subsets[j]),
                                cfg, warm_at(opts, j));
    });
    return reports;
}

Matrix stack_columns(const std::vector<SolveReport>& reports, Eigen::Index n) {
    Matrix X(n, static_cast<Eigen::Index>(reports.size()));
    for (std::size_t j = 0; j < reports.size(); ++j) {
        X.col(static_cast<Eigen::Index>(j)) = reports[j].X.col(0);
    }
    return X;
}

}  // namespace

const char* to_string(Method method) noexcept {
    switch (method) {
        case Method::jobs: return "jobs";
        case Method::bagging: return "bagging";
        case Method::bolasso: return "bolasso";
        case Method::l1: return "l1";
    }
    return "?";
}

Method parse_method(const std::string& name) {
    if (name == "jobs") return Method::jobs;
    if (name == "bagging") return Method::bagging;
    if (name == "bolasso") return Method::bolasso;
    if (name == "l1") return Method::l1;
    throw ParameterError("unknown method '" + name + "' (expected jobs, bagging, bolasso or l1)");
}

void SensingProblem::validate() const {
    if (A.rows() < 1 || A.cols() < 1) throw ParameterError("sensing matrix is empty");
    if (A.rows() != y.size()) {
        throw ParameterError("dimension mismatch: A is " + std::to_string(A.rows()) + "x" +
                             std::to_string(A.cols()) + " but y has length " +
                             std::to_string(y.size()));
    }
}

int RecoveryResult::total_iterations() const {
    int total = 0;
    for (const auto& r : solver_reports) total += r.iterations;
    return total;
}

bool RecoveryResult::all_converged() const {
    return std::all_of(solver_reports.begin(), solver_reports.end(),
                       [](const SolveReport& r) { return r.converged; });
}

IndexSet intersect_supports(const std::vector<IndexSet>& supports) {
    if (supports.empty()) return {};
    IndexSet common = supports.front();
    for (std::size_t j = 1; j < supports.size() && !common.empty(); ++j) {
        IndexSet next;
        std::set_intersection(common.begin(), common.end(), supports[j].begin(),
                              supports[j].end(), std::back_inserter(next));
        common = std::move(next);
    }
    return common;
}

RecoveryResult jobs(const SensingProblem& prob, const std::vector<IndexMultiset>& subsets,
                    const SolverConfig& cfg, const EnsembleOptions& opts) {
    prob.validate();
    check_subsets(subsets);
    JointProblem joint;
    joint.A.reserve(subsets.size());
    joint.y.reserve(subsets.size());
    for (const auto& subset : subsets) {
        joint.A.push_back(select_rows(prob.A, subset));
        joint.y.push_back(select_rows(prob.y, subset));
    }
    RecoveryResult out;
    out.method = Method::jobs;
    out.solver_reports.push_back(admm_group_lasso(joint, cfg, warm_at(opts, 0)));
    const Matrix& X = out.solver_reports.front().X;
    out.x_hat = column_mean(X);
    out.per_estimate = X;
    out.support = row_support(out.x_hat);
    return out;
}

RecoveryResult jobs(const SensingProblem& prob, const SamplingPlan& plan,
                    const SolverConfig& cfg, const EnsembleOptions& opts) {
    check_plan(prob, plan);
    return jobs(prob, generate_subsets(plan), cfg, opts);
}

RecoveryResult bagging(const SensingProblem& prob, const std::vector<IndexMultiset>& subsets,
                       const SolverConfig& cfg, const EnsembleOptions& opts) {
    prob.validate();
    check_subsets(subsets);
    RecoveryResult out;
    out.method = Method::bagging;
    out.solver_reports = independent_solves(prob, subsets, cfg, opts);
    Matrix X = stack_columns(out.solver_reports, prob.A.cols());
    out.x_hat = column_mean(X);
    out.per_estimate = std::move(X);
    out.support = row_support(out.x_hat);
    return out;
}

RecoveryResult bagging(const SensingProblem& prob, const SamplingPlan& plan,
                       const SolverConfig& cfg, const EnsembleOptions& opts) {
    check_plan(prob, plan);
    return bagging(prob, generate_subsets(plan), cfg, opts);
}

RecoveryResult bolasso(const SensingProblem& prob, const std::vector<IndexMultiset>& subsets,
                       const SolverConfig& cfg, const EnsembleOptions& opts) {
    prob.validate();
    check_subsets(subsets);
    RecoveryResult out;
    out.method = Method::bolasso;
    out.solver_reports = independent_solves(prob, subsets, cfg, opts);
    Matrix X = stack_columns(out.solver_reports, prob.A.cols());
    std::vector<IndexSet> supports;
    supports.reserve(subsets.size());
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
        supports.push_back(row_support(Vector(X.col(j)), opts.support_tol));
    }
    out.x_hat = least_squares_on_support(prob.A, prob.y, intersect_supports(supports));
    out.per_estimate = std::move(X);
    out.support = row_support(out.x_hat);
    return out;
}

RecoveryResult bolasso(const SensingProblem& prob, const SamplingPlan& plan,
                       const SolverConfig& cfg, const EnsembleOptions& opts) {
    check_plan(prob, plan);
    return bolasso(prob, generate_subsets(plan), cfg, opts);
}

RecoveryResult l1_min(const SensingProblem& prob, const SolverConfig& cfg,
                      const EnsembleOptions& opts) {
    prob.validate();
    RecoveryResult out;
    out.method = Method::l1;
    out.solver_reports.push_back(admm_lasso(prob.A, prob.y, cfg, warm_at(opts, 0)));
    out.x_hat = out.solver_reports.front().X.col(0);
    out.support = row_support(out.x_hat);
    return out;
}

RecoveryResult recover(Method method, const SensingProblem& prob,
                       const std::vector<IndexMultiset>& subsets, const SolverConfig& cfg,
                       const EnsembleOptions& opts) {
    switch (method) {
        case Method::jobs: return jobs(prob, subsets, cfg, opts);
        case Method::bagging: return bagging(prob, subsets, cfg, opts);
        case Method::bolasso: return bolasso(prob, subsets, cfg, opts);
        case Method::l1: return l1_min(prob, cfg, opts);
    }
    throw ParameterError("unknown method");
}

}  // namespace sparseboot
