#include <gtest/gtest.h>

#include <filesystem>

#include "levelseg/image_io.hpp"

using namespace levelseg;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::path(::testing::TempDir()) / ("levelseg_io_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

Raster ramp(int w, int h, int channels) {
  Raster r(w, h, channels);
  for (int c = 0; c < channels; ++c)
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) r.at(x, y, c) = (x * 13 + y * 7 + c * 50) % 256;
  return r;
}

}  // namespace

TEST(Png, GrayRoundTrip) {
  const Raster img = ramp(17, 9, 1);
  EXPECT_EQ(decode_png(encode_png(img)), img);
}

TEST(Png, RgbRoundTrip) {
  const Raster img = ramp(8, 12, 3);
  const Raster back = decode_png(encode_png(img));
  EXPECT_EQ(back.channels(), 3);
  EXPECT_EQ(back, img);
}

TEST(Png, RoundsAndClamps) {
  Raster img(4, 4);
  img.at(0, 0) = 300;
  img.at(1, 0) = -5;
  img.at(2, 0) = 12.6;
  const Raster back = decode_png(encode_png(img));
  EXPECT_EQ(back.at(0, 0), 255);
  EXPECT_EQ(back.at(1, 0), 0);
  EXPECT_EQ(back.at(2, 0), 13);
}

TEST(Png, RejectsGarbage) {
  EXPECT_THROW(decode_png({1, 2, 3, 4}), IoError);
}

TEST(Pgm, RoundTripAndHeaderComments) {
  const Raster img = ramp(10, 6, 1);
  EXPECT_EQ(decode_pgm(encode_pgm(img)), img);
  const std::string text = "P5\n# comment\n3 3\n255\n";
  std::vector<std::uint8_t> bytes(text.begin(), text.end());
  for (int i = 0; i < 9; ++i) bytes.push_back(static_cast<std::uint8_t>(i * 20));
  const Raster r = decode_pgm(bytes);
  EXPECT_EQ(r.at(2, 2), 160);
}

TEST(Pgm, Errors) {
  const std::string p2 = "P2\n3 3\n255\n";
  EXPECT_THROW(decode_pgm({p2.begin(), p2.end()}), IoError);
  const std::string short_data = "P5\n3 3\n255\nab";
  EXPECT_THROW(decode_pgm({short_data.begin(), short_data.end()}), IoError);
  EXPECT_THROW(encode_pgm(Raster(3, 3, 3)), InvalidParameter);
}

TEST(Files, ReadWriteBySignature) {
  const fs::path dir = scratch("files");
  const Raster img = ramp(9, 9, 1);
  write_image(dir / "a.png", img);
  write_image(dir / "b.pgm", img);
  EXPECT_EQ(read_image(dir / "a.png"), img);
  EXPECT_EQ(read_image(dir / "b.pgm"), img);
  EXPECT_FALSE(fs::exists(dir / "a.png.tmp"));
  write_text_atomic(dir / "c.txt", "hello");
  EXPECT_THROW(read_image(dir / "c.txt"), IoError);
  EXPECT_THROW(read_image(dir / "missing.png"), IoError);
}

TEST(Files, MaskRoundTrip) {
  const fs::path dir = scratch("mask");
  BinaryMask m(7, 5);
  m.set(1, 1);
  m.set(6, 4);
  write_mask(dir / "m.png", m);
  EXPECT_EQ(read_mask(dir / "m.png"), m);
}

TEST(Files, MaskThresholdIsMidGray) {
  Raster r(3, 3);
  r.at(0, 0) = 127;
  r.at(1, 0) = 128;
  const BinaryMask m = raster_to_mask(r);
  EXPECT_FALSE(m.at(0, 0));
  EXPECT_TRUE(m.at(1, 0));
}

TEST(PhiDump, RoundTripAndLayout) {
  LevelSetField phi(5, 4);
  for (int y = 0; y < 4; ++y)
    for (int x = 0; x < 5; ++x) phi.at(x, y) = x - 1.25 * y + 1e-7;
  const auto bytes = encode_phi_raw(phi);
  ASSERT_EQ(bytes.size(), 8u + 20 * 8);
  EXPECT_EQ(bytes[0], 5);
  EXPECT_EQ(bytes[4], 4);
  EXPECT_EQ(decode_phi_raw(bytes), phi);
  auto bad = bytes;
  bad.pop_back();
  EXPECT_THROW(decode_phi_raw(bad), IoError);
}

TEST(PhiDisplay, AffineToByteRange) {
  LevelSetField phi(3, 3, -2.0);
  phi.at(1, 1) = 6.0;
  const Raster d = phi_to_display(phi);
  EXPECT_EQ(d.at(0, 0), 0.0);
  EXPECT_EQ(d.at(1, 1), 255.0);
  const Raster flat = phi_to_display(LevelSetField(3, 3, 1.0));
  for (double v : flat.plane()) EXPECT_EQ(v, 0.0);
}
