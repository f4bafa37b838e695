#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "levelseg/saliency.hpp"

using namespace levelseg;

namespace {

// Center weight of a normalized 5x5 Gaussian with sigma 0.5, summed directly.
double center_weight_sigma_half() {
  double sum = 0;
  for (int dy = -2; dy <= 2; ++dy)
    for (int dx = -2; dx <= 2; ++dx) sum += std::exp(-(dx * dx + dy * dy) / (2 * 0.25));
  return 1.0 / sum;
}

}  // namespace

TEST(SaliencyGray, ConstantImageIsZero) {
  const SaliencyMap s = saliency_gray(Raster(17, 11, 1, 93.0));
  for (double v : s.values().plane()) EXPECT_EQ(v, 0.0);
}

TEST(SaliencyGray, SingleBrightPixel) {
  Raster img(33, 33);
  img.at(16, 16) = 255.0;
  const Raster s = saliency_gray_raw(img);
  const double mean = 255.0 / 1089.0;
  EXPECT_NEAR(mean, 0.2342, 1e-4);
  EXPECT_NEAR(s.at(0, 0), mean, 1e-9);
  EXPECT_NEAR(s.at(32, 0), mean, 1e-9);
  EXPECT_NEAR(s.at(16, 16), std::abs(mean - 255.0 * center_weight_sigma_half()), 1e-9);
}

TEST(SaliencyGray, NormalizedToFullRange) {
  Raster img(20, 20, 1, 10.0);
  img.at(5, 5) = 200.0;
  const SaliencyMap s = saliency_gray(img);
  double lo = 1e9, hi = -1e9;
  for (double v : s.values().plane()) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  EXPECT_GE(lo, 0.0);
  EXPECT_NEAR(hi, 255.0, 1e-12);
}

TEST(SaliencyGray, NormalizationIsIdempotent) {
  std::mt19937 rng(4);
  std::uniform_real_distribution<double> u(0, 255);
  Raster img(24, 24);
  for (double& v : img.plane()) v = u(rng);
  const Raster once = normalize_to_255(saliency_gray_raw(img));
  const Raster twice = normalize_to_255(once);
  for (std::size_t i = 0; i < once.pixel_count(); ++i) EXPECT_NEAR(once.plane()[i], twice.plane()[i], 1e-12);
}

TEST(SaliencyGray, TransposeInvariantForSymmetricInput) {
  Raster img(21, 21);
  for (int y = 0; y < 21; ++y)
    for (int x = 0; x < 21; ++x) img.at(x, y) = (x * y) % 7 * 30.0 + x + y;
  const Raster s = saliency_gray(img).values();
  for (int y = 0; y < 21; ++y)
    for (int x = 0; x < 21; ++x) EXPECT_NEAR(s.at(x, y), s.at(y, x), 1e-9);
}

TEST(SaliencyGray, PeriodicPatternTranslationInterior) {
  // Period-4 stripes shifted by one period: interior saliency is unchanged.
  const int n = 40;
  Raster a(n, n), b(n, n);
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x) {
      a.at(x, y) = (x % 4 < 2) ? 200.0 : 40.0;
      b.at(x, y) = ((x + 4) % 4 < 2) ? 200.0 : 40.0;
    }
  const Raster sa = saliency_gray_raw(a), sb = saliency_gray_raw(b);
  for (int y = 10; y < n - 10; ++y)
    for (int x = 10; x < n - 10; ++x) EXPECT_NEAR(sa.at(x, y), sb.at(x, y), 1e-9);
}

TEST(SaliencyGray, SdrelPresetUsesSmallerKernel) {
  Raster img(9, 9);
  img.at(4, 4) = 255.0;
  const Raster s = saliency_gray_raw(img, kSdrelSaliency);
  // 3x3 support: two pixels away only the mean remains.
  EXPECT_NEAR(s.at(4, 2), 255.0 / 81.0, 1e-12);
  EXPECT_GT(s.at(4, 3), 255.0 / 81.0);
}

TEST(SaliencyColor, ConstantColorIsZero) {
  Raster lab(10, 10, 3);
  for (int c = 0; c < 3; ++c)
    for (double& v : lab.plane(c)) v = 10.0 * (c + 1);
  const SaliencyMap s = saliency_color(lab);
  for (double v : s.values().plane()) EXPECT_NEAR(v, 0.0, 1e-12);
}

TEST(SaliencyColor, LightnessOnlyMatchesGray) {
  Raster lab(15, 15, 3), L(15, 15);
  for (int y = 0; y < 15; ++y)
    for (int x = 0; x < 15; ++x) L.at(x, y) = lab.at(x, y, 0) = (x * 7 + y * 3) % 100;
  const Raster a = saliency_color(lab).values(), b = saliency_gray(L).values();
  for (std::size_t i = 0; i < a.pixel_count(); ++i) EXPECT_NEAR(a.plane()[i], b.plane()[i], 1e-9);
}

TEST(SaliencyColor, TwoToneBruteForce) {
  const int n = 12;
  Raster lab(n, n, 3);
  const double left[3] = {30, 20, -40}, right[3] = {70, -15, 25};
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x)
      for (int c = 0; c < 3; ++c) lab.at(x, y, c) = x < n / 2 ? left[c] : right[c];
  const Raster s = saliency_color_raw(lab);

  // Direct evaluation: blurred vector at each pixel, distance to the mean vector.
  double w[5][5], sum = 0;
  for (int dy = -2; dy <= 2; ++dy)
    for (int dx = -2; dx <= 2; ++dx) sum += w[dy + 2][dx + 2] = std::exp(-(dx * dx + dy * dy) / 0.5);
  for (auto& row : w)
    for (double& v : row) v /= sum;
  double mean[3];
  for (int c = 0; c < 3; ++c) mean[c] = 0.5 * (left[c] + right[c]);
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x) {
      double d2 = 0;
      for (int c = 0; c < 3; ++c) {
        double blur = 0;
        for (int dy = -2; dy <= 2; ++dy)
          for (int dx = -2; dx <= 2; ++dx) {
            const int sx = std::clamp(x - dx, 0, n - 1);
            blur += w[dy + 2][dx + 2] * (sx < n / 2 ? left[c] : right[c]);
          }
        d2 += (mean[c] - blur) * (mean[c] - blur);
      }
      EXPECT_NEAR(s.at(x, y), std::sqrt(d2), 1e-9);
    }
}

TEST(Saliency, ChannelChecks) {
  EXPECT_THROW(saliency_gray(Raster(5, 5, 3)), InvalidParameter);
  EXPECT_THROW(saliency_color(Raster(5, 5, 1)), InvalidParameter);
  EXPECT_THROW(SaliencyMap(Raster(5, 5, 3)), InvalidParameter);
}
