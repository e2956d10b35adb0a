#include "sparseboot/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>

#include "sparseboot/errors.hpp"
#include "sparseboot/linalg.hpp"

namespace sparseboot {

namespace {

constexpr double kSqrt2 = 1.4142135623730950488;

// 1 - exp(-x) for x >= 0 (x may be +inf), reported with the clamp flag.
BoundOutput with_probability(double bound, double exponent) {
    BoundOutput out;
    out.error_bound = bound;
    double p = std::isinf(exponent) ? 1.0 : -std::expm1(-exponent);
    if (std::isnan(p)) p = 0.0;
    out.clamped = p < 0.0 || p > 1.0;
    out.probability_lower_bound = std::clamp(p, 0.0, 1.0);
    return out;
}

// numerator / denominator, with numerator > 0 and denominator == 0 giving +inf.
double ratio_or_inf(double numerator, double denominator) {
    if (denominator == 0.0) return std::numeric_limits<double>::infinity();
    return numerator / denominator;
}

void check_inputs(const BoundInputs& in, bool check_noise_consistency) {
    if (in.L < 1 || in.m < 1 || in.K < 1) throw ParameterError("bounds: L, m, K must be >= 1");
    if (!(in.tau > 0.0)) throw ParameterError("bounds: tau must be > 0");
    for (double v : {in.z_l2, in.z_linf, in.e_l1, in.e_l2, in.e_linf, in.a_inf1}) {
        if (!(v >= 0.0) || !std::isfinite(v)) {
            throw ParameterError("bounds: norms must be finite and nonnegative");
        }
    }
    if (check_noise_consistency && in.z_linf > in.z_l2) {
        throw ParameterError("bounds: ||z||_inf cannot exceed ||z||_2");
    }
}

double spectral_deviation(const Matrix& gram) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(gram, Eigen::EigenvaluesOnly);
    const auto& ev = eig.eigenvalues();
    return std::max(ev.maxCoeff() - 1.0, 1.0 - ev.minCoeff());
}

}  // namespace

RecoveryConstants c_constants(double delta) {
    if (!(delta >= 0.0) || !(delta < kRipCeiling)) {
        throw DomainError("RIP constant delta must lie in [0, sqrt(2) - 1)");
    }
    const double denom = 1.0 - (1.0 + kSqrt2) * delta;
    if (!(denom > 0.0)) throw DomainError("RIP constant delta too close to sqrt(2) - 1");
    return {2.0 * (1.0 - (1.0 - kSqrt2) * delta) / denom, 4.0 * std::sqrt(1.0 + delta) / denom};
}

std::uint64_t binomial_count(std::uint64_t n, std::uint64_t s) {
    if (s > n) return 0;
    s = std::min(s, n - s);
    unsigned __int128 acc = 1;
    for (std::uint64_t i = 1; i <= s; ++i) {
        acc = acc * (n - s + i) / i;
        if (acc > std::numeric_limits<std::uint64_t>::max()) {
            return std::numeric_limits<std::uint64_t>::max();
        }
    }
    return static_cast<std::uint64_t>(acc);
}

double rip_constant_exhaustive(const Matrix& A, std::size_t s, std::uint64_t cap) {
    const auto n = static_cast<std::size_t>(A.cols());
    if (s < 1 || s > n) throw ParameterError("rip: sparsity order must lie in [1, n]");
    for (Eigen::Index j = 0; j < A.cols(); ++j) {
        if (std::abs(A.col(j).norm() - 1.0) > 1e-8) {
            throw ParameterError("rip: column " + std::to_string(j) +
                                 " is not unit-norm; normalize columns first");
        }
    }
    const auto subsets = binomial_count(n, s);
    if (subsets > cap) {
        throw ResourceError("rip: C(" + std::to_string(n) + ", " + std::to_string(s) +
                            ") subsets exceeds the enumeration cap of " + std::to_string(cap) +
                            "; use a smaller n or s");
    }

    const Matrix gram = A.transpose() * A;
    std::vector<std::size_t> pick(s);
    for (std::size_t i = 0; i < s; ++i) pick[i] = i;
    Matrix sub(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(s));
    double worst = 0.0;
    while (true) {
        for (std::size_t a = 0; a < s; ++a) {
            for (std::size_t b = 0; b < s; ++b) {
                sub(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
                    gram(static_cast<Eigen::Index>(pick[a]), static_cast<Eigen::Index>(pick[b]));
            }
        }
        worst = std::max(worst, spectral_deviation(sub));

        // Next combination in lexicographic order.
        std::size_t i = s;
        while (i > 0 && pick[i - 1] == n - s + (i - 1)) --i;
        if (i == 0) break;
        ++pick[i - 1];
        for (std::size_t k = i; k < s; ++k) pick[k] = pick[k - 1] + 1;
    }
    return worst;
}

double brip_jobs(const Matrix& A, const std::vector<IndexMultiset>& subsets, std::size_t s,
                 std::uint64_t cap) {
    if (subsets.empty()) throw ParameterError("brip: need at least one subset");
    double worst = 0.0;
    for (std::size_t j = 0; j < subsets.size(); ++j) {
        Matrix sub = select_rows(A, subsets[j]);
        NormalizedColumns normalized;
        try {
            normalized = normalize_columns(sub);
        } catch (const DegenerateColumnError& e) {
            throw DegenerateSubsetError(j, "brip: subset " + std::to_string(j) +
                                               " yields a zero column (" + e.what() + ")");
        }
        worst = std::max(worst, rip_constant_exhaustive(normalized.matrix, s, cap));
    }
    return worst;
}

double expected_noise_power(std::size_t K, std::size_t L, std::size_t m, double z_l2) {
    if (m < 1) throw ParameterError("expected_noise_power: m must be >= 1");
    return static_cast<double>(K) * static_cast<double>(L) * z_l2 * z_l2 /
           static_cast<double>(m);
}

BoundOutput jobs_error_bound(const BoundInputs& in, bool exact_sparse) {
    check_inputs(in, exact_sparse);
    const auto c = c_constants(in.delta);
    const double L = static_cast<double>(in.L);
    const double scale = std::sqrt(L / static_cast<double>(in.m));
    const double tau4 = std::pow(in.tau, 4);
    const double two_k = 2.0 * static_cast<double>(in.K);
    if (exact_sparse) {
        const double bound = c.C1 * (scale * in.z_l2 + in.tau);
        return with_probability(bound, ratio_or_inf(two_k * tau4, L * std::pow(in.z_linf, 4)));
    }
    const double bound = in.e_l2 + c.C1 * (scale * in.z_l2 + in.tau);
    const double peak = in.a_inf1 * in.e_linf + in.z_linf;
    return with_probability(bound, ratio_or_inf(two_k * tau4, L * std::pow(peak, 4)));
}

BoundOutput bagging_error_bound(const BoundInputs& in, bool exact_sparse) {
    check_inputs(in, true);
    const auto c = c_constants(in.delta);
    const double L = static_cast<double>(in.L);
    const double scale = std::sqrt(L / static_cast<double>(in.m));
    const double tau4 = std::pow(in.tau, 4);
    const double two_k = 2.0 * static_cast<double>(in.K);
    if (exact_sparse) {
        const double bound = c.C1 * (scale * in.z_l2 + in.tau);
        return with_probability(bound,
                                ratio_or_inf(two_k * tau4, L * L * std::pow(in.z_linf, 4)));
    }
    if (in.s < 1) throw ParameterError("bounds: s must be >= 1");
    const double approx = c.C0 * in.e_l1 / std::sqrt(static_cast<double>(in.s));
    const double bound = approx + c.C1 * (scale * in.z_l2 + in.tau);
    const double b_prime = std::pow(approx + c.C1 * std::sqrt(L) * in.z_linf, 2);
    return with_probability(bound,
                            ratio_or_inf(two_k * std::pow(c.C1, 4) * tau4, b_prime * b_prime));
}

std::uint64_t sample_complexity_jobs(std::size_t n, std::size_t s, std::size_t K, double alpha,
                                     double mu, double beta, double delta) {
    if (n < 1 || s < 1 || K < 1) throw ParameterError("complexity: n, s, K must be >= 1");
    if (!(alpha > 0.0 && alpha <= mu && mu < 1.0)) {
        throw ParameterError("complexity: need 0 < alpha <= mu < 1");
    }
    if (!(beta > 0.0)) throw ParameterError("complexity: beta must be > 0");
    if (!(delta > 0.0 && delta < kRipCeiling)) {
        throw DomainError("complexity: delta must lie in (0, sqrt(2) - 1)");
    }
    const double kd = static_cast<double>(K);
    const double survive = std::pow(1.0 - alpha, kd);
    const double slack = survive - (1.0 - mu);
    if (!(slack > 0.0)) {
        throw InfeasibleError("complexity: (1 - alpha)^K <= 1 - mu, so no sample size works");
    }
    const double two_s = 2.0 * static_cast<double>(s);
    const double inner =
        two_s * std::log(static_cast<double>(n) / two_s) + std::log(kd) + std::log(survive / slack);
    const double d = beta / (delta * delta) * inner;
    if (!(d > 0.0)) return 0;
    return static_cast<std::uint64_t>(std::ceil(d));
}

double hoeffding_tail(std::size_t n, double eps, double a, double b, double mean) {
    if (!(a < b)) throw ParameterError("hoeffding: need a < b");
    if (eps <= mean) return 1.0;
    const double gap = eps - mean;
    const double width = b - a;
    const double p = std::exp(-2.0 * static_cast<double>(n) * gap * gap / (width * width));
    return std::clamp(p, 0.0, 1.0);
}

}  // namespace sparseboot
