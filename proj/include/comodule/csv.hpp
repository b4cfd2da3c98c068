#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "comodule/errors.hpp"
#include "comodule/types.hpp"

namespace comodule {

struct CsvMatrix {
  Matrix data;
  std::vector<std::string> header;  // empty when the file had none
};

/// Reads a numeric CSV (rows = samples, columns = features). A single header
/// row is auto-detected by a non-numeric first row. Throws ParseError with
/// 1-based row/column location, IoError when unreadable.
CsvMatrix read_csv(const std::filesystem::path& path);

/// Writes a matrix as CSV with 17 significant digits (round-trips doubles
/// exactly). Atomic: writes a temp file in the same directory, then renames.
void write_csv(const std::filesystem::path& path, const Matrix& m,
               const std::vector<std::string>& header = {});

/// Atomic text write (temp + rename).
void write_text_atomic(const std::filesystem::path& path, const std::string& text);

/// Whole-file read.
std::string read_text(const std::filesystem::path& path);

/// FNV-1a 64-bit digest of a file's bytes, as 16 hex chars.
std::string file_digest(const std::filesystem::path& path);

}  // namespace comodule
