#include "comodule/csv.hpp"

#include <cerrno>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace comodule {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

bool parse_double(const std::string& s, double& out) {
  const char* begin = s.c_str();
  char* end = nullptr;
  errno = 0;
  out = std::strtod(begin, &end);
  if (end == begin || errno == ERANGE) return false;
  while (*end == ' ' || *end == '\t' || *end == '\r') ++end;
  return *end == '\0';
}

}  // namespace

CsvMatrix read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");

  std::vector<std::vector<double>> rows;
  CsvMatrix out;
  std::string line;
  Index lineno = 0;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto cells = split_line(line);
    std::vector<double> row(cells.size());
    bool numeric = true;
    Index bad_col = 0;
    for (std::size_t j = 0; j < cells.size(); ++j) {
      if (!parse_double(cells[j], row[j])) {
        numeric = false;
        bad_col = static_cast<Index>(j) + 1;
        break;
      }
    }
    if (!numeric) {
      if (lineno == 1) {  // header row
        out.header = std::move(cells);
        continue;
      }
      throw ParseError(lineno, bad_col, "not a number");
    }
    if (width == 0)
      width = row.size();
    else if (row.size() != width)
      throw ParseError(lineno, static_cast<Index>(row.size()),
                       "expected " + std::to_string(width) + " columns");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError(lineno, 0, "no data rows");

  out.data.resize(static_cast<Index>(rows.size()), static_cast<Index>(width));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < width; ++j)
      out.data(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
  return out;
}

void write_text_atomic(const std::filesystem::path& path, const std::string& text) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream outf(tmp, std::ios::binary | std::ios::trunc);
    if (!outf) throw IoError("cannot open '" + tmp.string() + "' for writing");
    outf << text;
    if (!outf) throw IoError("write failed for '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("rename to '" + path.string() + "' failed: " + ec.message());
}

void write_csv(const std::filesystem::path& path, const Matrix& m,
               const std::vector<std::string>& header) {
  std::string buf;
  buf.reserve(static_cast<std::size_t>(m.size()) * 20);
  if (!header.empty()) {
    for (std::size_t j = 0; j < header.size(); ++j) {
      if (j) buf += ',';
      buf += header[j];
    }
    buf += '\n';
  }
  char cell[40];
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      std::snprintf(cell, sizeof(cell), "%.17g", m(i, j));
      if (j) buf += ',';
      buf += cell;
    }
    buf += '\n';
  }
  write_text_atomic(path, buf);
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string file_digest(const std::filesystem::path& path) {
  const std::string bytes = read_text(path);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char hex[17];
  std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(h));
  return hex;
}

}  // namespace comodule
