#include "qrht/matrix_market.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace qrht {

std::string format_double(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

static std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

Matrix read_matrix_market(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;

  if (!std::getline(in, line)) throw ParseError("empty file", 1);
  ++lineno;
  {
    std::istringstream hs(line);
    std::string banner, object, fmt, field, symmetry;
    hs >> banner >> object >> fmt >> field >> symmetry;
    if (banner != "%%MatrixMarket" || lower(object) != "matrix")
      throw ParseError("malformed MatrixMarket banner", lineno);
    if (lower(fmt) != "array" || lower(field) != "real" || lower(symmetry) != "general")
      throw ParseError("unsupported format: need 'array real general'", lineno);
  }

  // Size line (skipping comments).
  std::size_t rows = 0, cols = 0;
  for (;;) {
    if (!std::getline(in, line)) throw ParseError("missing size line", lineno + 1);
    ++lineno;
    if (!line.empty() && line[0] == '%') continue;
    std::istringstream ss(line);
    long long r = -1, c = -1;
    if (!(ss >> r >> c) || r < 1 || c < 1) throw ParseError("malformed size line", lineno);
    rows = static_cast<std::size_t>(r);
    cols = static_cast<std::size_t>(c);
    break;
  }

  Matrix m(rows, cols);
  std::size_t count = 0;
  const std::size_t total = rows * cols;
  while (count < total) {
    if (!std::getline(in, line))
      throw ParseError("expected " + std::to_string(total) + " values, got " +
                           std::to_string(count),
                       lineno + 1);
    ++lineno;
    if (!line.empty() && line[0] == '%') continue;
    std::istringstream ss(line);
    std::string tok;
    while (ss >> tok) {
      if (count >= total) throw ParseError("too many values", lineno);
      double v = 0.0;
      auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
      if (res.ec != std::errc() || res.ptr != tok.data() + tok.size())
        throw ParseError("non-numeric token '" + tok + "'", lineno);
      // Array format is column-major, matching our storage.
      m.data()[count++] = v;
    }
  }
  return m;
}

Matrix read_matrix_market(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ParseError("cannot open '" + path + "'", 0);
  return read_matrix_market(f);
}

void write_matrix_market(const Matrix& m, std::ostream& out) {
  out << "%%MatrixMarket matrix array real general\n";
  out << m.rows() << " " << m.cols() << "\n";
  const std::size_t total = m.rows() * m.cols();
  for (std::size_t k = 0; k < total; ++k) out << format_double(m.data()[k]) << "\n";
}

void write_matrix_market(const Matrix& m, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw ParseError("cannot open '" + path + "' for writing", 0);
  write_matrix_market(m, f);
}

}  // namespace qrht
