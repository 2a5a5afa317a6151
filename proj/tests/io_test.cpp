#include <gtest/gtest.h>

#include <filesystem>

#include "pgpce/benchmarks.hpp"
#include "pgpce/binary_io.hpp"
#include "pgpce/dataset_io.hpp"
#include "pgpce/errors.hpp"
#include "pgpce/model_io.hpp"
#include "synthetic.hpp"

using namespace pgpce;

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::path(::testing::TempDir()) / name).string();
}

TrainedSurrogate small_model() {
  const Dataset d = generate_dataset(find_problem("lotka-volterra"), 20, 3);
  SurrogateConfig cfg;
  cfg.clustering.restarts = 2;
  return train(d, cfg);
}

}  // namespace

TEST(BinaryIO, ScalarsAreLittleEndian) {
  io::Writer w;
  w.u32(0x01020304u);
  w.f64(1.0);
  const std::string& b = w.data();
  ASSERT_EQ(b.size(), 12u);
  EXPECT_EQ(static_cast<unsigned char>(b[0]), 0x04);
  EXPECT_EQ(static_cast<unsigned char>(b[3]), 0x01);
  EXPECT_EQ(static_cast<unsigned char>(b[11]), 0x3f);
}

TEST(BinaryIO, MatrixIsRowMajor) {
  Matrix m(2, 2);
  m << 1, 2, 3, 4;
  io::Writer w;
  w.matrix(m);
  io::Reader r(w.data());
  r.u64();
  r.u64();
  EXPECT_EQ(r.f64(), 1.0);
  EXPECT_EQ(r.f64(), 2.0);
  io::Reader again(w.data());
  EXPECT_TRUE(again.matrix() == m);
  EXPECT_TRUE(again.at_end());
}

TEST(DatasetIO, RoundTripIsBitwise) {
  const Dataset d = generate_dataset(find_problem("lotka-volterra"), 12, 5);
  const std::string path = temp_path("lv.pgds");
  save_dataset(d, path);
  const Dataset back = load_snapshot_dataset(path);
  EXPECT_TRUE(back.thetas == d.thetas);
  ASSERT_EQ(back.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) EXPECT_TRUE(back.responses[i] == d.responses[i]);
  EXPECT_EQ(encode_dataset(back), encode_dataset(d));
  EXPECT_EQ(io::read_file(path), encode_dataset(d));
  EXPECT_EQ(io::read_file(path).substr(0, 4), "PGDS");
}

TEST(DatasetIO, TruncationReportsOffset) {
  const std::string bytes = encode_dataset(generate_dataset(find_problem("cstr"), 3, 1));
  for (std::size_t cut : {std::size_t{2}, std::size_t{20}, bytes.size() / 2, bytes.size() - 1}) {
    try {
      decode_dataset(bytes.substr(0, cut));
      FAIL() << "expected FormatError at cut " << cut;
    } catch (const FormatError& e) {
      EXPECT_LE(e.offset(), cut);
      EXPECT_NE(std::string(e.what()).find("byte offset"), std::string::npos);
    }
  }
}

TEST(DatasetIO, BadMagicVersionAndTrailingBytes) {
  std::string bytes = encode_dataset(generate_dataset(find_problem("sphere"), 3, 1));
  std::string wrong = bytes;
  wrong[0] = 'X';
  EXPECT_THROW(decode_dataset(wrong), FormatError);
  std::string version = bytes;
  version[4] = 9;
  EXPECT_THROW(decode_dataset(version), FormatError);
  EXPECT_THROW(decode_dataset(bytes + "z"), FormatError);
  EXPECT_THROW(load_snapshot_dataset(temp_path("missing.pgds")), Error);
}

TEST(ModelIO, RoundTripIsBitwiseStable) {
  const TrainedSurrogate m = small_model();
  const std::string bytes = encode_model(m);
  EXPECT_EQ(bytes.substr(0, 4), "PGSM");
  const TrainedSurrogate back = decode_model(bytes);
  EXPECT_EQ(encode_model(back), bytes);
  const std::string path = temp_path("lv.pgsm");
  save_model(m, path);
  EXPECT_EQ(encode_model(load_model(path)), bytes);
  // The reloaded model predicts bitwise the same.
  Vector t(2);
  t << 0.93, 0.12;
  EXPECT_TRUE(predict(back, t) == predict(m, t));
}

TEST(ModelIO, TrainingIsDeterministic) {
  EXPECT_EQ(encode_model(small_model()), encode_model(small_model()));
}

TEST(ModelIO, CorruptionIsReported) {
  const std::string bytes = encode_model(small_model());
  try {
    decode_model(bytes.substr(0, bytes.size() - 9));
    FAIL() << "expected FormatError";
  } catch (const FormatError& e) {
    EXPECT_LE(e.offset(), bytes.size() - 9);
  }
  std::string version = bytes;
  version[4] = 2;
  EXPECT_THROW(decode_model(version), FormatError);
  EXPECT_THROW(decode_model("PGDS"), FormatError);
}
