#include "nmlr/matrix_io.hpp"

#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <vector>

namespace nmlr {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ParseError(path + ": " + what);
}

std::string_view trimmed(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
    s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

double parse_field(std::string_view field, const std::string& path, size_t line,
                   size_t column) {
  const std::string_view f = trimmed(field);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), value);
  if (ec != std::errc() || ptr != f.data() + f.size())
    fail(path, "line " + std::to_string(line) + ", field " + std::to_string(column) +
                   ": not a number: '" + std::string(f) + "'");
  if (!std::isfinite(value))
    fail(path, "line " + std::to_string(line) + ", field " + std::to_string(column) +
                   ": non-finite value");
  return value;
}

}  // namespace

Matrix read_matrix_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(path, "cannot open");

  std::vector<std::vector<double>> rows;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trimmed(line).empty()) {
      // Tolerate a trailing newline; blank lines elsewhere are malformed.
      if (in.peek() == std::char_traits<char>::eof()) break;
      fail(path, "line " + std::to_string(lineno) + ": blank line");
    }
    std::vector<double> row;
    size_t start = 0, column = 0;
    while (true) {
      ++column;
      const size_t comma = line.find(',', start);
      const size_t end = comma == std::string::npos ? line.size() : comma;
      row.push_back(
          parse_field(std::string_view(line).substr(start, end - start), path, lineno, column));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (!rows.empty() && row.size() != rows.front().size())
      fail(path, "line " + std::to_string(lineno) + ": expected " +
                     std::to_string(rows.front().size()) + " fields, got " +
                     std::to_string(row.size()));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) fail(path, "empty matrix");

  Matrix M(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (Index i = 0; i < M.rows(); ++i)
    for (Index j = 0; j < M.cols(); ++j)
      M(i, j) = rows[static_cast<size_t>(i)][static_cast<size_t>(j)];
  return M;
}

void write_matrix_csv(const Matrix& M, const std::string& path) {
  require_finite(M, "write_matrix_csv");
  std::ofstream out(path);
  if (!out) throw ParseError(path + ": cannot open for writing");
  char buf[32];
  for (Index i = 0; i < M.rows(); ++i) {
    for (Index j = 0; j < M.cols(); ++j) {
      const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), M(i, j));
      if (ec != std::errc()) throw ParseError(path + ": formatting failed");
      if (j) out.put(',');
      out.write(buf, ptr - buf);
    }
    out.put('\n');
  }
  if (!out) throw ParseError(path + ": write failed");
}

namespace {

// Next whitespace-delimited header token, skipping '#' comments.
std::string pgm_token(std::istream& in, const std::string& path) {
  std::string tok;
  int c;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n') {
      }
      continue;
    }
    if (std::isspace(c)) {
      if (!tok.empty()) return tok;
      continue;
    }
    tok.push_back(static_cast<char>(c));
  }
  if (tok.empty()) fail(path, "truncated header");
  return tok;
}

long pgm_int(std::istream& in, const std::string& path, const char* what) {
  const std::string tok = pgm_token(in, path);
  long value = 0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc() || ptr != tok.data() + tok.size() || value < 0)
    fail(path, std::string("bad ") + what + ": '" + tok + "'");
  return value;
}

}  // namespace

Matrix read_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(path, "cannot open");

  const std::string magic = pgm_token(in, path);
  if (magic != "P2" && magic != "P5") fail(path, "not a PGM (want P2 or P5)");
  const long cols = pgm_int(in, path, "width");
  const long rows = pgm_int(in, path, "height");
  const long maxval = pgm_int(in, path, "maxval");
  if (cols < 1 || rows < 1) fail(path, "bad dimensions");
  if (maxval < 1 || maxval > 65535) fail(path, "maxval out of range [1, 65535]");

  Matrix M(rows, cols);
  if (magic == "P2") {
    for (long i = 0; i < rows; ++i)
      for (long j = 0; j < cols; ++j) {
        const long v = pgm_int(in, path, "sample");
        if (v > maxval) fail(path, "sample exceeds maxval");
        M(i, j) = static_cast<double>(v) / static_cast<double>(maxval);
      }
  } else {
    // Binary samples start right after the single whitespace ending the header.
    const int bytes = maxval > 255 ? 2 : 1;
    std::vector<unsigned char> raw(static_cast<size_t>(rows * cols * bytes));
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (static_cast<size_t>(in.gcount()) != raw.size()) fail(path, "truncated pixel data");
    size_t k = 0;
    for (long i = 0; i < rows; ++i)
      for (long j = 0; j < cols; ++j) {
        long v = raw[k++];
        if (bytes == 2) v = (v << 8) | raw[k++];  // big-endian
        if (v > maxval) fail(path, "sample exceeds maxval");
        M(i, j) = static_cast<double>(v) / static_cast<double>(maxval);
      }
  }
  return M;
}

void write_pgm(const Matrix& M, const std::string& path) {
  require_finite(M, "write_pgm");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError(path + ": cannot open for writing");
  out << "P5\n" << M.cols() << " " << M.rows() << "\n255\n";
  for (Index i = 0; i < M.rows(); ++i)
    for (Index j = 0; j < M.cols(); ++j) {
      const double v = std::min(1.0, std::max(0.0, M(i, j)));
      out.put(static_cast<char>(static_cast<unsigned char>(std::lround(v * 255.0))));
    }
  if (!out) throw ParseError(path + ": write failed");
}

}  // namespace nmlr
