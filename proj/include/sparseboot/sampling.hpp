#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sparseboot/types.hpp"

namespace sparseboot {

struct SamplingPlan {
    std::size_t m = 1;  // measurement count
    std::size_t L = 1;  // subset size
    std::size_t K = 1;  // number of subsets
    Scheme scheme = Scheme::bootstrap;
    std::uint64_t master_seed = 0;

    void validate() const;
};

/// K index multisets. Subset j depends only on (master_seed, j).
std::vector<IndexMultiset> generate_subsets(const SamplingPlan& plan);

/// Subset j of the plan on its own.
IndexMultiset generate_subset(const SamplingPlan& plan, std::size_t j);

/// P(V = v) for v = 1..L, where V is the number of distinct values among L
/// uniform draws with replacement from m. Element v-1 holds P(V = v).
std::vector<double> distinct_count_pmf(std::size_t m, std::size_t L);

/// P(V >= d), 1 <= d <= L.
double distinct_tail(std::size_t m, std::size_t L, std::size_t d);

/// Largest d with P(V >= d) >= 1 - alpha; 1 if none larger qualifies.
std::size_t distinct_lower_bound(std::size_t m, std::size_t L, double alpha);

const char* to_string(Scheme scheme) noexcept;
Scheme parse_scheme(const std::string& name);

}  // namespace sparseboot
