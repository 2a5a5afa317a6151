#include "pgpce/dataset_io.hpp"

#include "pgpce/binary_io.hpp"
#include "pgpce/errors.hpp"

namespace pgpce {
namespace {

constexpr std::uint32_t kUniformKind = 0;
constexpr std::uint64_t kMaxDim = 1u << 20;

}  // namespace

std::string encode_dataset(const Dataset& data) {
  data.validate();
  io::Writer w;
  w.bytes("PGDS");
  w.u32(kDatasetFormatVersion);
  w.u64(data.size());
  w.u64(static_cast<std::uint64_t>(data.input_dim()));
  w.u64(static_cast<std::uint64_t>(data.rows()));
  w.u64(static_cast<std::uint64_t>(data.cols()));
  for (const auto& m : data.distribution.marginals) {
    w.u32(kUniformKind);
    w.f64(m.lo);
    w.f64(m.hi);
  }
  for (std::size_t i = 0; i < data.size(); ++i) {
    for (Index k = 0; k < data.input_dim(); ++k) w.f64(data.thetas(static_cast<Index>(i), k));
    const Matrix& y = data.responses[i];
    for (Index r = 0; r < y.rows(); ++r) {
      for (Index c = 0; c < y.cols(); ++c) w.f64(y(r, c));
    }
  }
  return w.data();
}

Dataset decode_dataset(std::string bytes) {
  io::Reader r(std::move(bytes));
  r.expect_magic("PGDS");
  const std::uint64_t at_version = r.offset();
  const std::uint32_t version = r.u32();
  if (version != kDatasetFormatVersion) {
    throw FormatError("unsupported dataset version " + std::to_string(version), at_version);
  }
  const std::uint64_t n = r.u64();
  const std::uint64_t d = r.count(kMaxDim, "input dimension");
  const std::uint64_t rows = r.count(kMaxDim, "response rows");
  const std::uint64_t cols = r.count(kMaxDim, "response columns");
  if (n == 0 || d == 0 || rows == 0 || cols == 0) r.fail("dataset header has a zero dimension");

  std::vector<UniformMarginal> marginals;
  for (std::uint64_t k = 0; k < d; ++k) {
    const std::uint64_t at = r.offset();
    const std::uint32_t kind = r.u32();
    if (kind != kUniformKind) throw FormatError("unsupported marginal kind " + std::to_string(kind), at);
    const double lo = r.f64();
    const double hi = r.f64();
    if (!(lo < hi)) throw FormatError("marginal with lo >= hi", at);
    marginals.push_back({lo, hi});
  }

  Dataset data;
  data.distribution = InputDistribution(std::move(marginals));
  data.thetas.resize(0, static_cast<Index>(d));
  std::vector<Vector> thetas;
  for (std::uint64_t i = 0; i < n; ++i) {
    Vector theta(static_cast<Index>(d));
    for (Index k = 0; k < theta.size(); ++k) theta(k) = r.f64();
    Matrix y(static_cast<Index>(rows), static_cast<Index>(cols));
    for (Index a = 0; a < y.rows(); ++a) {
      for (Index b = 0; b < y.cols(); ++b) y(a, b) = r.f64();
    }
    thetas.push_back(std::move(theta));
    data.responses.push_back(std::move(y));
  }
  r.expect_end();
  data.thetas.resize(static_cast<Index>(n), static_cast<Index>(d));
  for (std::size_t i = 0; i < thetas.size(); ++i) data.thetas.row(static_cast<Index>(i)) = thetas[i].transpose();
  data.validate();
  return data;
}

void save_dataset(const Dataset& data, const std::string& path) {
  io::write_file(path, encode_dataset(data));
}

Dataset load_snapshot_dataset(const std::string& path) {
  return decode_dataset(io::read_file(path));
}

}  // namespace pgpce
