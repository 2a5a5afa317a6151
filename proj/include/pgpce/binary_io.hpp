#pragma once

// Little-endian binary encoding shared by the model and dataset containers.

#include <cstdint>
#include <string>
#include <string_view>

#include "pgpce/manifold.hpp"

namespace pgpce::io {

class Writer {
 public:
  void bytes(std::string_view s) { buf_.append(s); }
  void u32(std::uint32_t v);
  void u64(std::uint64_t v);
  void f64(double v);
  /// u64 length, then the entries.
  void vector(const Vector& v);
  /// u64 rows, u64 cols, then the entries in row-major order.
  void matrix(const Matrix& m);

  const std::string& data() const noexcept { return buf_; }

 private:
  std::string buf_;
};

/// Bounds-checked reader. Every failure is a FormatError carrying the offset
/// at which the problem was detected.
class Reader {
 public:
  explicit Reader(std::string data) : buf_(std::move(data)) {}

  void expect_magic(std::string_view magic);
  std::uint32_t u32();
  std::uint64_t u64();
  double f64();
  Vector vector();
  Matrix matrix();
  /// u64 that must not exceed `limit`.
  std::uint64_t count(std::uint64_t limit, std::string_view what);

  std::uint64_t offset() const noexcept { return pos_; }
  std::uint64_t remaining() const noexcept { return buf_.size() - pos_; }
  bool at_end() const noexcept { return pos_ == buf_.size(); }
  /// Throws unless the whole buffer was consumed.
  void expect_end() const;
  [[noreturn]] void fail(const std::string& what) const;

 private:
  void need(std::uint64_t n, std::string_view what) const;

  std::string buf_;
  std::uint64_t pos_ = 0;
};

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& data);

}  // namespace pgpce::io
