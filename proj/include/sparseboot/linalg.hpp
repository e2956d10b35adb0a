#pragma once

#include <span>

#include "sparseboot/types.hpp"

namespace sparseboot {

// Diagonal Q(M) with entries 1/||m_i||_2, so that M*Q has unit columns.
struct NormalizationMatrix {
    Vector diag;

    Matrix apply(const Matrix& m) const { return m * diag.asDiagonal(); }
    // Undo the scaling: M = (M*Q) * Q^{-1}.
    Matrix invert(const Matrix& mq) const { return mq * diag.cwiseInverse().asDiagonal(); }
};

struct NormalizedColumns {
    Matrix matrix;
    NormalizationMatrix q;
};

inline constexpr double kDefaultSupportTol = 1e-4;

/// Mixed norm (sum_i ||row_i||_q^p)^{1/p}. Only p, q in {1, 2} are accepted.
double mixed_norm(const Matrix& x, double p, double q);

/// Stack the rows of `a` named by `rows`, in order; duplicates repeat.
Matrix select_rows(const Matrix& a, std::span<const std::size_t> rows);
Vector select_rows(const Vector& y, std::span<const std::size_t> rows);

inline Matrix select_rows(const Matrix& a, const IndexMultiset& rows) {
    return select_rows(a, std::span<const std::size_t>(rows.indices));
}
inline Vector select_rows(const Vector& y, const IndexMultiset& rows) {
    return select_rows(y, std::span<const std::size_t>(rows.indices));
}

/// Rescale every column to unit l2 norm. Throws DegenerateColumnError on a
/// zero column.
NormalizedColumns normalize_columns(const Matrix& m);

/// Rows whose l2 norm exceeds rel_tol times the largest row norm.
IndexSet row_support(const Matrix& x, double rel_tol = kDefaultSupportTol);
IndexSet row_support(const Vector& x, double rel_tol = kDefaultSupportTol);

}  // namespace sparseboot
