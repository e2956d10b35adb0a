#include "sparseboot/matrix_io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "sparseboot/errors.hpp"

namespace sparseboot {

namespace {

std::string non_finite(double v) {
    if (std::isnan(v)) return "nan";
    return v > 0 ? "inf" : "-inf";
}

double parse_real(const std::string& token, const std::filesystem::path& path) {
    if (token == "inf" || token == "+inf") return INFINITY;
    if (token == "-inf") return -INFINITY;
    if (token == "nan") return NAN;
    double v = 0.0;
    const auto* end = token.data() + token.size();
    auto [ptr, ec] = std::from_chars(token.data(), end, v);
    if (ec != std::errc{} || ptr != end) {
        throw ParameterError("malformed number '" + token + "' in " + path.string());
    }
    return v;
}

}  // namespace

std::string format_real(double v) {
    if (!std::isfinite(v)) return non_finite(v);
    std::array<char, 64> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), ptr);
}

std::string format_real_scientific(double v) {
    if (!std::isfinite(v)) return non_finite(v);
    std::array<char, 64> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v,
                                   std::chars_format::scientific, 16);
    return std::string(buf.data(), ptr);
}

void write_matrix(const std::filesystem::path& path, const Matrix& m) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << m.rows() << ' ' << m.cols() << '\n';
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j) out << ' ';
            out << format_real_scientific(m(i, j));
        }
        out << '\n';
    }
    if (!out) throw IoError("failed writing " + path.string());
}

void write_vector(const std::filesystem::path& path, const Vector& v) {
    write_matrix(path, Matrix(v));
}

Matrix read_matrix(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    long rows = 0;
    long cols = 0;
    if (!(in >> rows >> cols) || rows < 1 || cols < 1) {
        throw ParameterError("bad matrix header in " + path.string());
    }
    Matrix m(rows, cols);
    std::string token;
    for (long i = 0; i < rows; ++i) {
        for (long j = 0; j < cols; ++j) {
            if (!(in >> token)) {
                throw ParameterError("matrix file " + path.string() + " is truncated");
            }
            m(i, j) = parse_real(token, path);
        }
    }
    if (in >> token) throw ParameterError("trailing data in matrix file " + path.string());
    return m;
}

Vector read_vector(const std::filesystem::path& path) {
    const Matrix m = read_matrix(path);
    if (m.cols() == 1) return m.col(0);
    if (m.rows() == 1) return m.row(0).transpose();
    throw ParameterError(path.string() + " holds a matrix, expected a vector");
}

}  // namespace sparseboot
