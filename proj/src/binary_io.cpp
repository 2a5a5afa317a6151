#include "pgpce/binary_io.hpp"

#include <bit>
#include <fstream>
#include <iterator>
#include <limits>

#include "pgpce/errors.hpp"

namespace pgpce::io {
namespace {

template <typename T>
void put_le(std::string& buf, T v) {
  for (std::size_t i = 0; i < sizeof(T); ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

}  // namespace

void Writer::u32(std::uint32_t v) { put_le(buf_, v); }
void Writer::u64(std::uint64_t v) { put_le(buf_, v); }
void Writer::f64(double v) { put_le(buf_, std::bit_cast<std::uint64_t>(v)); }

void Writer::vector(const Vector& v) {
  u64(static_cast<std::uint64_t>(v.size()));
  for (Index i = 0; i < v.size(); ++i) f64(v(i));
}

void Writer::matrix(const Matrix& m) {
  u64(static_cast<std::uint64_t>(m.rows()));
  u64(static_cast<std::uint64_t>(m.cols()));
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) f64(m(i, j));
  }
}

void Reader::fail(const std::string& what) const { throw FormatError(what, pos_); }

void Reader::need(std::uint64_t n, std::string_view what) const {
  if (n > buf_.size() - pos_) {
    fail("unexpected end of file while reading " + std::string(what));
  }
}

void Reader::expect_magic(std::string_view magic) {
  need(magic.size(), "magic bytes");
  if (std::string_view(buf_).substr(pos_, magic.size()) != magic) {
    fail("bad magic bytes, expected '" + std::string(magic) + "'");
  }
  pos_ += magic.size();
}

std::uint32_t Reader::u32() {
  need(4, "u32");
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(buf_[pos_ + i])) << (8 * i);
  pos_ += 4;
  return v;
}

std::uint64_t Reader::u64() {
  need(8, "u64");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf_[pos_ + i])) << (8 * i);
  pos_ += 8;
  return v;
}

double Reader::f64() {
  need(8, "f64");
  return std::bit_cast<double>(u64());
}

std::uint64_t Reader::count(std::uint64_t limit, std::string_view what) {
  const std::uint64_t at = pos_;
  const std::uint64_t v = u64();
  if (v > limit) throw FormatError("implausible " + std::string(what) + " " + std::to_string(v), at);
  return v;
}

Vector Reader::vector() {
  const std::uint64_t n = count((buf_.size() - pos_) / 8, "vector length");
  Vector v(static_cast<Index>(n));
  for (Index i = 0; i < v.size(); ++i) v(i) = f64();
  return v;
}

Matrix Reader::matrix() {
  const std::uint64_t at = pos_;
  const std::uint64_t rows = u64();
  const std::uint64_t cols = u64();
  const std::uint64_t avail = (buf_.size() - pos_) / 8;
  if ((cols != 0 && rows > avail / cols) || (rows == 0 && cols > (std::uint64_t{1} << 40)) ||
      (cols == 0 && rows > (std::uint64_t{1} << 40))) {
    throw FormatError("matrix of " + std::to_string(rows) + "x" + std::to_string(cols) +
                          " does not fit in the file",
                      at);
  }
  Matrix m(static_cast<Index>(rows), static_cast<Index>(cols));
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) m(i, j) = f64();
  }
  return m;
}

void Reader::expect_end() const {
  if (!at_end()) fail("trailing bytes after the last section");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "' for reading");
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file(const std::string& path, const std::string& data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!out) throw Error("failed writing '" + path + "'");
}

}  // namespace pgpce::io
