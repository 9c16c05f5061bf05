#pragma once

#include <filesystem>
#include <iosfwd>

#include "lrsp/matrix_core.hpp"

namespace lrsp {

/// csv: `rows,cols` header then one line per row, 17 significant digits.
/// bin: "LRSP", u32 LE rows, u32 LE cols, rows*cols LE IEEE-754 doubles, row-major.
enum class MatrixFormat { csv, bin };

/// Picks the format from the extension (.csv / .bin); throws ArgumentError otherwise.
MatrixFormat format_from_path(const std::filesystem::path& path);

Matrix read_matrix(const std::filesystem::path& path, MatrixFormat format);
Matrix read_matrix(const std::filesystem::path& path);
void write_matrix(const std::filesystem::path& path, const Matrix& m, MatrixFormat format);
void write_matrix(const std::filesystem::path& path, const Matrix& m);

Matrix read_matrix_csv(std::istream& in, const std::string& source = "<stream>");
void write_matrix_csv(std::ostream& out, const Matrix& m);
Matrix read_matrix_bin(std::istream& in, const std::string& source = "<stream>");
void write_matrix_bin(std::ostream& out, const Matrix& m);

}  // namespace lrsp
