#include "sparseboot/linalg.hpp"

#include <cmath>
#include <string>

#include "sparseboot/errors.hpp"

namespace sparseboot {

namespace {

bool is_one_or_two(double v) { return v == 1.0 || v == 2.0; }

template <class Dense>
void check_rows(const Dense& a, std::span<const std::size_t> rows) {
    const auto n = static_cast<std::size_t>(a.rows());
    for (std::size_t r : rows) {
        if (r >= n) {
            throw IndexError("row index " + std::to_string(r) + " out of range [0, " +
                             std::to_string(n) + ")");
        }
    }
}

}  // namespace

double mixed_norm(const Matrix& x, double p, double q) {
    if (!is_one_or_two(p) || !is_one_or_two(q)) {
        throw ParameterError("mixed_norm supports p, q in {1, 2} only");
    }
    double acc = 0.0;
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        const double row = (q == 1.0) ? x.row(i).lpNorm<1>() : x.row(i).norm();
        acc += (p == 1.0) ? row : row * row;
    }
    return (p == 1.0) ? acc : std::sqrt(acc);
}

Matrix select_rows(const Matrix& a, std::span<const std::size_t> rows) {
    check_rows(a, rows);
    Matrix out(static_cast<Eigen::Index>(rows.size()), a.cols());
    for (std::size_t k = 0; k < rows.size(); ++k) {
        out.row(static_cast<Eigen::Index>(k)) = a.row(static_cast<Eigen::Index>(rows[k]));
    }
    return out;
}

Vector select_rows(const Vector& y, std::span<const std::size_t> rows) {
    check_rows(y, rows);
    Vector out(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t k = 0; k < rows.size(); ++k) {
        out[static_cast<Eigen::Index>(k)] = y[static_cast<Eigen::Index>(rows[k])];
    }
    return out;
}

NormalizedColumns normalize_columns(const Matrix& m) {
    NormalizedColumns out{m, NormalizationMatrix{Vector(m.cols())}};
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
        const double norm = m.col(j).norm();
        if (!(norm > 0.0) || !std::isfinite(norm)) {
            throw DegenerateColumnError("column " + std::to_string(j) +
                                        " has zero or non-finite norm");
        }
        out.q.diag[j] = 1.0 / norm;
        out.matrix.col(j) /= norm;
    }
    return out;
}

IndexSet row_support(const Matrix& x, double rel_tol) {
    if (!(rel_tol >= 0.0 && rel_tol < 1.0)) {
        throw ParameterError("row_support: rel_tol must lie in [0, 1)");
    }
    const Vector norms = x.rowwise().norm();
    IndexSet support;
    if (norms.size() == 0) return support;
    const double cutoff = rel_tol * norms.maxCoeff();
    for (Eigen::Index i = 0; i < norms.size(); ++i) {
        if (norms[i] > cutoff) support.push_back(static_cast<std::size_t>(i));
    }
    return support;
}

IndexSet row_support(const Vector& x, double rel_tol) {
    return row_support(Matrix(x), rel_tol);
}

}  // namespace sparseboot
