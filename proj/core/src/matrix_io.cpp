#include "lrsp/matrix_io.hpp"

#include <array>
#include <bit>
#include <cerrno>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <string>

#include "lrsp/errors.hpp"

namespace lrsp {
namespace {

constexpr std::array<char, 4> kMagic{'L', 'R', 'S', 'P'};

[[noreturn]] void fail_line(const std::string& source, Index line, const std::string& what) {
  throw ParseError(source + ":" + std::to_string(line) + ": " + what);
}

[[noreturn]] void fail_byte(const std::string& source, std::streamoff offset, const std::string& what) {
  throw ParseError(source + ": byte " + std::to_string(offset) + ": " + what);
}

void put_u32(std::ostream& out, std::uint32_t v) {
  const std::array<char, 4> b{static_cast<char>(v & 0xFF), static_cast<char>((v >> 8) & 0xFF),
                              static_cast<char>((v >> 16) & 0xFF),
                              static_cast<char>((v >> 24) & 0xFF)};
  out.write(b.data(), 4);
}

std::uint32_t get_u32(const unsigned char* b) {
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

// Parses a comma-separated list of exactly `expected` finite doubles.
void parse_row(const std::string& text, Index expected, double* dst, const std::string& source,
               Index line) {
  const char* p = text.c_str();
  for (Index c = 0; c < expected; ++c) {
    while (*p == ' ' || *p == '\t') ++p;
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(p, &end);
    if (end == p) fail_line(source, line, "expected a number in column " + std::to_string(c + 1));
    if (!std::isfinite(v)) fail_line(source, line, "non-finite value in column " + std::to_string(c + 1));
    dst[c] = v;
    p = end;
    while (*p == ' ' || *p == '\t' || *p == '\r') ++p;
    if (c + 1 < expected) {
      if (*p != ',') fail_line(source, line, "expected " + std::to_string(expected) + " columns");
      ++p;
    }
  }
  if (*p != '\0') fail_line(source, line, "trailing characters after column " + std::to_string(expected));
}

}  // namespace

MatrixFormat format_from_path(const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  if (ext == ".csv") return MatrixFormat::csv;
  if (ext == ".bin") return MatrixFormat::bin;
  throw ArgumentError("cannot infer matrix format from '" + path.string() + "' (use .csv or .bin)");
}

Matrix read_matrix_csv(std::istream& in, const std::string& source) {
  std::string line;
  if (!std::getline(in, line)) fail_line(source, 1, "missing `rows,cols` header");
  long long rows = 0;
  long long cols = 0;
  {
    char* end = nullptr;
    rows = std::strtoll(line.c_str(), &end, 10);
    if (*end != ',') fail_line(source, 1, "malformed header, expected `rows,cols`");
    const char* rest = end + 1;
    cols = std::strtoll(rest, &end, 10);
    while (*end == '\r' || *end == ' ') ++end;
    if (end == rest || *end != '\0') fail_line(source, 1, "malformed header, expected `rows,cols`");
  }
  if (rows < 1 || cols < 1) fail_line(source, 1, "dimensions must be positive");
  Matrix m(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    if (!std::getline(in, line)) {
      fail_line(source, r + 2, "truncated: expected " + std::to_string(rows) + " data rows");
    }
    parse_row(line, cols, m.row(r).data(), source, r + 2);
  }
  return m;
}

void write_matrix_csv(std::ostream& out, const Matrix& m) {
  out << m.rows() << ',' << m.cols() << '\n';
  char buf[32];
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = 0; c < m.cols(); ++c) {
      std::snprintf(buf, sizeof buf, "%.17g", m(r, c));
      if (c) out << ',';
      out << buf;
    }
    out << '\n';
  }
}

Matrix read_matrix_bin(std::istream& in, const std::string& source) {
  unsigned char header[12];
  in.read(reinterpret_cast<char*>(header), sizeof header);
  const auto got = in.gcount();
  if (got < 4 || std::memcmp(header, kMagic.data(), 4) != 0) {
    fail_byte(source, 0, "missing LRSP magic");
  }
  if (got < 12) fail_byte(source, got, "truncated header");
  const std::uint32_t rows = get_u32(header + 4);
  const std::uint32_t cols = get_u32(header + 8);
  if (rows == 0 || cols == 0) fail_byte(source, 4, "dimensions must be positive");
  Matrix m(static_cast<Index>(rows), static_cast<Index>(cols));
  const std::size_t count = static_cast<std::size_t>(rows) * cols;
  std::uint64_t word = 0;
  unsigned char bytes[8];
  for (std::size_t i = 0; i < count; ++i) {
    in.read(reinterpret_cast<char*>(bytes), 8);
    if (in.gcount() != 8) {
      fail_byte(source, static_cast<std::streamoff>(12 + 8 * i + in.gcount()),
                "truncated payload: expected " + std::to_string(count) + " doubles");
    }
    word = 0;
    for (int b = 7; b >= 0; --b) word = (word << 8) | bytes[b];
    m.data()[i] = std::bit_cast<double>(word);
  }
  return m;
}

void write_matrix_bin(std::ostream& out, const Matrix& m) {
  if (m.rows() > std::numeric_limits<std::uint32_t>::max() ||
      m.cols() > std::numeric_limits<std::uint32_t>::max()) {
    throw ArgumentError("matrix too large for the bin format");
  }
  out.write(kMagic.data(), 4);
  put_u32(out, static_cast<std::uint32_t>(m.rows()));
  put_u32(out, static_cast<std::uint32_t>(m.cols()));
  char bytes[8];
  for (Index i = 0; i < m.size(); ++i) {
    std::uint64_t word = std::bit_cast<std::uint64_t>(m.data()[i]);
    for (int b = 0; b < 8; ++b) {
      bytes[b] = static_cast<char>(word & 0xFF);
      word >>= 8;
    }
    out.write(bytes, 8);
  }
}

Matrix read_matrix(const std::filesystem::path& path, MatrixFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  return format == MatrixFormat::csv ? read_matrix_csv(in, path.string())
                                     : read_matrix_bin(in, path.string());
}

Matrix read_matrix(const std::filesystem::path& path) {
  return read_matrix(path, format_from_path(path));
}

void write_matrix(const std::filesystem::path& path, const Matrix& m, MatrixFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ArgumentError("cannot open " + path.string() + " for writing");
  if (format == MatrixFormat::csv) {
    write_matrix_csv(out, m);
  } else {
    write_matrix_bin(out, m);
  }
  if (!out) throw ArgumentError("write to " + path.string() + " failed");
}

void write_matrix(const std::filesystem::path& path, const Matrix& m) {
  write_matrix(path, m, format_from_path(path));
}

}  // namespace lrsp
