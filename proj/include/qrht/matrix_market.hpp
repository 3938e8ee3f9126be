#pragma once

#include <iosfwd>
#include <string>

#include "qrht/matrix.hpp"

namespace qrht {

/// Matrix Market dense "array real general" I/O. Values are written with
/// shortest round-trip decimals, so write/read round-trips bitwise.
Matrix read_matrix_market(std::istream& in);
Matrix read_matrix_market(const std::string& path);
void write_matrix_market(const Matrix& m, std::ostream& out);
void write_matrix_market(const Matrix& m, const std::string& path);

/// Shortest decimal that round-trips to exactly v.
std::string format_double(double v);

}  // namespace qrht
