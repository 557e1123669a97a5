#pragma once

#include "nmlr/linalg.hpp"

#include <stdexcept>
#include <string>

namespace nmlr {

// Malformed or unreadable input files. Messages carry the path and, for CSV,
// the 1-based line number.
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Headerless comma-separated numeric rectangle. Writing uses shortest
// round-trip decimal formatting, so write followed by read reproduces every
// entry bit for bit.
Matrix read_matrix_csv(const std::string& path);
void write_matrix_csv(const Matrix& M, const std::string& path);

// PGM (P2 or P5), maxval up to 65535; samples come back scaled to [0, 1].
Matrix read_pgm(const std::string& path);

// Writes binary PGM (P5) at maxval 255; entries are clamped to [0, 1] first.
void write_pgm(const Matrix& M, const std::string& path);

}  // namespace nmlr
