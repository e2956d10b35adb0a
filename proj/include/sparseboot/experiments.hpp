#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "sparseboot/estimators.hpp"

namespace sparseboot {

struct InstanceSpec {
    std::size_t m = 1;
    std::size_t n = 1;
    std::size_t s = 1;
    double snr_db = 0.0;  // +inf requests a noiseless instance
    std::uint64_t seed = 0;
    // Use sigma^2 = 10^(-snr/10) ||A x*||^2 without dividing by m.
    bool literal_noise = false;

    void validate() const;
};

struct Instance {
    Matrix A;
    Vector x_star;
    Vector z;
    Vector y;

    SensingProblem problem() const { return {A, y}; }
};

/// Gaussian A, s-sparse Gaussian x* on a uniform support, Gaussian noise
/// calibrated to snr_db. Deterministic in spec.seed.
Instance generate_instance(const InstanceSpec& spec);

inline constexpr double kRsnrCap = 300.0;

/// 10 log10(||x*||^2 / ||x_hat - x*||^2), capped at kRsnrCap for exact recovery.
double recovery_snr(const Vector& x_hat, const Vector& x_star);
/// 10 log10(||x_hat - x*||^2 / ||x*||^2); the negation of recovery_snr.
double recovery_snr_literal(const Vector& x_hat, const Vector& x_star);

/// `count` log-spaced values on [lo, hi], ascending.
std::vector<double> log_grid(double lo, double hi, std::size_t count);
std::vector<double> default_lambda_grid();

// One (method, m, K, L) configuration of the sweep.
struct Cell {
    Method method = Method::l1;
    std::size_t m = 1;
    std::size_t n = 1;
    std::size_t s = 1;
    double snr_db = 0.0;
    std::size_t K = 1;
    std::size_t L = 1;
    double ratio = 1.0;
    Scheme scheme = Scheme::bootstrap;
    bool literal_noise = false;
};

struct TrialSeeds {
    std::uint64_t instance;
    std::uint64_t sampling;
};

/// Per-trial seeds. The instance seed depends only on (master, m, n, s, snr,
/// trial) and the sampling seed on (master, m, K, L, scheme, trial), so all
/// methods and all lambdas of a trial see the same data and subsets.
std::vector<TrialSeeds> trial_seeds(std::uint64_t master_seed, const Cell& cell,
                                    std::size_t trials);

struct TrialOutcome {
    double rsnr_db = 0.0;
    double rsnr_literal_db = 0.0;
    int iterations = 0;
    bool converged = false;
    bool failed = false;         // solver diverged
    bool zero_estimate = false;  // x_hat identically zero
    double wall_ms = 0.0;
};

struct SearchOptions {
    SolverConfig solver;  // lambda is overwritten by the grid
    bool warm_start = true;
    std::size_t threads = 1;  // parallel over trials
};

struct LambdaSearchResult {
    double best_lambda = 0.0;
    double mean_rsnr = 0.0;
    std::vector<double> mean_by_lambda;          // aligned with the grid
    std::vector<TrialOutcome> trials_at_best;    // one per trial
};

/// Evaluate every grid value on the same trials and keep the lambda with the
/// highest mean RSNR; ties go to the larger lambda. A lambda at which any
/// trial diverged is ranked below every other.
LambdaSearchResult lambda_search(const Cell& cell, std::span<const double> grid,
                                 const std::vector<TrialSeeds>& seeds,
                                 const SearchOptions& opts = {});

/// All trial outcomes for one lambda list, indexed [lambda][trial].
std::vector<std::vector<TrialOutcome>> evaluate_cell(const Cell& cell,
                                                     std::span<const double> grid,
                                                     const std::vector<TrialSeeds>& seeds,
                                                     const SearchOptions& opts = {});

struct SweepSpec {
    std::vector<std::size_t> m_list{100};
    std::size_t n = 200;
    std::size_t s = 50;
    double snr_db = 0.0;
    std::vector<Method> methods{Method::jobs, Method::bagging, Method::bolasso, Method::l1};
    std::vector<std::size_t> K_list{30};
    std::vector<double> ratio_list{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
    std::vector<double> lambda_grid = default_lambda_grid();
    std::size_t trials = 20;
    Scheme scheme = Scheme::bootstrap;
    std::uint64_t master_seed = 0;
    bool literal_noise = false;
    bool warm_start = true;
    bool record_timing = false;  // wall_ms is written as 0 unless set
    SolverConfig solver;

    void validate() const;
};

SweepSpec load_sweep_spec(const std::filesystem::path& path);

/// Cells in output order: m, then method, then K, then ratio. l1 yields one
/// cell per m with K = 1, L = m.
std::vector<Cell> enumerate_cells(const SweepSpec& spec);

/// L = round(ratio * m), at least 1.
std::size_t subset_size(double ratio, std::size_t m);

struct SweepRecord {
    std::string method;
    std::size_t m = 0;
    std::size_t n = 0;
    std::size_t s = 0;
    double snr_db = 0.0;
    std::size_t K = 0;
    std::size_t L = 0;
    double ratio = 0.0;
    double lambda = 0.0;
    std::size_t trial = 0;
    double rsnr_db = 0.0;
    double rsnr_literal_db = 0.0;
    int iterations = 0;
    bool converged = false;
    double wall_ms = 0.0;
};

inline constexpr const char* kSweepCsvHeader =
    "method,m,n,s,snr_db,K,L,ratio,lambda,trial,rsnr_db,rsnr_literal_db,iterations,converged,"
    "wall_ms";

std::string format_record(const SweepRecord& r);
SweepRecord parse_record(const std::string& line);

using CellCallback = std::function<void(const Cell&, const LambdaSearchResult&)>;

/// Run every cell not already present in `out_path`, appending each finished
/// cell's records in cell order. Returns the full table, in cell order.
std::vector<SweepRecord> run_sweep(const SweepSpec& spec, const std::filesystem::path& out_path,
                                   std::size_t threads = 1, const CellCallback& on_cell = {});

}  // namespace sparseboot
