#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace sparseboot {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Sorted, duplicate-free list of zero-based indices.
using IndexSet = std::vector<std::size_t>;

enum class Scheme { bootstrap, subsample };

// Ordered multiset of row indices drawn from [0, m).
struct IndexMultiset {
    std::vector<std::size_t> indices;
    Scheme scheme = Scheme::bootstrap;

    std::size_t size() const noexcept { return indices.size(); }
};

}  // namespace sparseboot
