#include "sparseboot/sampling.hpp"

#include <numeric>
#include <string>

#include "sparseboot/errors.hpp"
#include "sparseboot/rng.hpp"

namespace sparseboot {

void SamplingPlan::validate() const {
    if (m < 1) throw ParameterError("sampling plan: m must be >= 1");
    if (L < 1) throw ParameterError("sampling plan: L must be >= 1");
    if (K < 1) throw ParameterError("sampling plan: K must be >= 1");
    if (scheme == Scheme::subsample && L > m) {
        throw ParameterError("sampling plan: subsample scheme requires L <= m (L=" +
                             std::to_string(L) + ", m=" + std::to_string(m) + ")");
    }
}

IndexMultiset generate_subset(const SamplingPlan& plan, std::size_t j) {
    plan.validate();
    Rng rng(derive_seed(plan.master_seed, {0x5u, j}));
    IndexMultiset out;
    out.scheme = plan.scheme;
    out.indices.resize(plan.L);
    if (plan.scheme == Scheme::bootstrap) {
        for (auto& idx : out.indices) idx = uniform_below(rng, plan.m);
    } else {
        // Partial Fisher-Yates: the first L slots are a uniform L-subset in
        // uniform random order.
        std::vector<std::size_t> pool(plan.m);
        std::iota(pool.begin(), pool.end(), std::size_t{0});
        for (std::size_t i = 0; i < plan.L; ++i) {
            const auto pick = i + uniform_below(rng, plan.m - i);
            std::swap(pool[i], pool[pick]);
            out.indices[i] = pool[i];
        }
    }
    return out;
}

std::vector<IndexMultiset> generate_subsets(const SamplingPlan& plan) {
    plan.validate();
    std::vector<IndexMultiset> out;
    out.reserve(plan.K);
    for (std::size_t j = 0; j < plan.K; ++j) out.push_back(generate_subset(plan, j));
    return out;
}

std::vector<double> distinct_count_pmf(std::size_t m, std::size_t L) {
    if (m < 1 || L < 1) throw ParameterError("distinct_count_pmf: m and L must be >= 1");
    // Occupancy recurrence over draws t = 1..L:
    //   P_t(v) = P_{t-1}(v) * v/m + P_{t-1}(v-1) * (m-v+1)/m.
    // Every term is nonnegative, so there is no cancellation; it agrees with
    // the inclusion-exclusion closed form.
    const std::size_t vmax = std::min(m, L);
    std::vector<double> p(vmax + 1, 0.0);  // p[v], v = 0..vmax
    p[1] = 1.0;
    const double md = static_cast<double>(m);
    for (std::size_t t = 2; t <= L; ++t) {
        const std::size_t top = std::min(t, vmax);
        for (std::size_t v = top; v >= 1; --v) {
            const double stay = p[v] * (static_cast<double>(v) / md);
            const double grow = p[v - 1] * (static_cast<double>(m - v + 1) / md);
            p[v] = stay + grow;
        }
    }
    std::vector<double> out(L, 0.0);
    for (std::size_t v = 1; v <= vmax; ++v) out[v - 1] = p[v];
    return out;
}

double distinct_tail(std::size_t m, std::size_t L, std::size_t d) {
    if (d < 1 || d > L) {
        throw ParameterError("distinct_tail: d must lie in [1, L]");
    }
    if (d == 1) return 1.0;
    const auto pmf = distinct_count_pmf(m, L);
    double tail = 0.0;
    for (std::size_t v = L; v >= d; --v) tail += pmf[v - 1];
    return std::min(tail, 1.0);
}

std::size_t distinct_lower_bound(std::size_t m, std::size_t L, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw ParameterError("distinct_lower_bound: alpha must lie in (0, 1)");
    }
    const auto pmf = distinct_count_pmf(m, L);
    const double need = 1.0 - alpha;
    // Accumulate from the top so the first qualifying d is the largest.
    double tail = 0.0;
    for (std::size_t d = L; d >= 2; --d) {
        tail += pmf[d - 1];
        if (tail >= need) return d;
    }
    return 1;
}

const char* to_string(Scheme scheme) noexcept {
    return scheme == Scheme::bootstrap ? "bootstrap" : "subsample";
}

Scheme parse_scheme(const std::string& name) {
    if (name == "bootstrap") return Scheme::bootstrap;
    if (name == "subsample") return Scheme::subsample;
    throw ParameterError("unknown sampling scheme '" + name + "'");
}

}  // namespace sparseboot
