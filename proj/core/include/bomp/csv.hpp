#pragma once

#include <filesystem>
#include <iosfwd>
#include <string_view>

#include "bomp/linalg.hpp"

namespace bomp {

/// Raw numeric CSV: one line per matrix row, comma separated, '.' decimal
/// point, no header. Blank lines are ignored. Throws std::runtime_error on
/// ragged rows, unparsable fields, or non-finite values.
Matrix parse_csv_matrix(std::istream& in);
Matrix read_csv_matrix(const std::filesystem::path& path);

/// A vector may be stored either as a single row or as a single column.
Vector read_csv_vector(const std::filesystem::path& path);

void write_csv_matrix(std::ostream& out, const Matrix& m);
void write_csv_matrix(const std::filesystem::path& path, const Matrix& m);

}  // namespace bomp
