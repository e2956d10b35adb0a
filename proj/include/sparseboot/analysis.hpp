#pragma once

#include <cstdint>
#include <vector>

#include "sparseboot/types.hpp"

namespace sparseboot {

// RIP-based recovery constants; valid for delta in [0, sqrt(2) - 1).
struct RecoveryConstants {
    double C0;
    double C1;
};

inline constexpr double kRipCeiling = 1.4142135623730950488 - 1.0;
inline constexpr std::uint64_t kDefaultEnumerationCap = 2'000'000;

RecoveryConstants c_constants(double delta);

/// Number of s-subsets of n items, saturating at UINT64_MAX.
std::uint64_t binomial_count(std::uint64_t n, std::uint64_t s);

/// delta_s(A) = max over |S| = s of ||A_S^T A_S - I||_2, by exhaustive
/// lexicographic enumeration. A must have unit-l2 columns.
double rip_constant_exhaustive(const Matrix& A, std::size_t s,
                               std::uint64_t cap = kDefaultEnumerationCap);

/// Block RIP of the JOBS block-diagonal system: max_j delta_s of the
/// column-normalized A[I_j]. Throws DegenerateSubsetError naming j.
double brip_jobs(const Matrix& A, const std::vector<IndexMultiset>& subsets, std::size_t s,
                 std::uint64_t cap = kDefaultEnumerationCap);

/// E ||Z||_{2,2}^2 = K L ||z||_2^2 / m for the bootstrapped noise matrix Z.
double expected_noise_power(std::size_t K, std::size_t L, std::size_t m, double z_l2);

struct BoundInputs {
    double delta = 0.0;
    std::size_t L = 1;
    std::size_t m = 1;
    std::size_t K = 1;
    double tau = 1.0;
    // JOBS general mode reads this as ||A e + z||_2, supplied by the caller.
    double z_l2 = 0.0;
    double z_linf = 0.0;
    std::size_t s = 1;
    double e_l1 = 0.0;
    double e_l2 = 0.0;
    double e_linf = 0.0;
    double a_inf1 = 0.0;  // largest row l1 norm of A
};

struct BoundOutput {
    double error_bound = 0.0;
    double probability_lower_bound = 0.0;  // clamped to [0, 1]
    bool clamped = false;                  // raw value fell outside [0, 1]
};

BoundOutput jobs_error_bound(const BoundInputs& in, bool exact_sparse);
BoundOutput bagging_error_bound(const BoundInputs& in, bool exact_sparse);

/// Smallest integer d >= beta / delta^2 * (2s ln(n/2s) + ln K +
/// ln((1-alpha)^K / ((1-alpha)^K - (1-mu)))).
std::uint64_t sample_complexity_jobs(std::size_t n, std::size_t s, std::size_t K, double alpha,
                                     double mu, double beta, double delta);

/// exp(-2n (eps - mean)^2 / (b - a)^2), or 1 when eps <= mean.
double hoeffding_tail(std::size_t n, double eps, double a, double b, double mean);

}  // namespace sparseboot
