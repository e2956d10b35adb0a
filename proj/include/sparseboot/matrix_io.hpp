#pragma once

#include <filesystem>
#include <string>

#include "sparseboot/types.hpp"

namespace sparseboot {

// Plain-text matrix files: first line "rows cols", then one line per row of
// whitespace-separated reals in scientific notation with 17 significant
// digits. Vectors are stored as n x 1.

std::string format_real(double v);               // shortest round-trip form
std::string format_real_scientific(double v);   // 17 significant digits

void write_matrix(const std::filesystem::path& path, const Matrix& m);
void write_vector(const std::filesystem::path& path, const Vector& v);
Matrix read_matrix(const std::filesystem::path& path);
Vector read_vector(const std::filesystem::path& path);  // accepts n x 1 or 1 x n

}  // namespace sparseboot
