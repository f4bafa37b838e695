#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "levelseg/levelset.hpp"

using namespace levelseg;

namespace {

// phi = scale * (r - R) around the grid center.
LevelSetField circle_field(int n, double R, double scale = 1.0) {
  LevelSetField phi(n, n);
  const double c = (n - 1) / 2.0;
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x) phi.at(x, y) = scale * (std::hypot(x - c, y - c) - R);
  return phi;
}

double radius_at(int n, int x, int y) {
  const double c = (n - 1) / 2.0;
  return std::hypot(x - c, y - c);
}

}  // namespace

TEST(Init, RectangleInteriorHoldsP) {
  const LevelSetField phi = init_level_set(32, 32, RectRegion{11, 11, 10, 10}, 2.0);
  for (int y = 12; y < 20; ++y)
    for (int x = 12; x < 20; ++x) EXPECT_EQ(phi.at(x, y), 2.0);
  EXPECT_EQ(phi.at(11, 15), 0.0);
  EXPECT_EQ(phi.at(20, 20), 0.0);
  EXPECT_EQ(phi.at(0, 0), -2.0);
  EXPECT_EQ(phi.at(21, 15), -2.0);
  for (double v : phi.samples()) EXPECT_TRUE(v == 2.0 || v == 0.0 || v == -2.0);
}

TEST(Init, HalfPlaneMaskSeed) {
  BinaryMask half(16, 12);
  for (int y = 0; y < 12; ++y)
    for (int x = 0; x < 8; ++x) half.set(x, y);
  const LevelSetField phi = init_level_set(16, 12, half, 2.0);
  for (int y = 0; y < 12; ++y)
    for (int x = 0; x < 16; ++x) {
      if (x == 7) continue;  // boundary column
      EXPECT_EQ(phi.at(x, y) > 0, half.at(x, y));
      EXPECT_EQ(phi.at(x, y) < 0, !half.at(x, y));
    }
}

TEST(Init, MaskFromInitMatchesSeedInterior) {
  const LevelSetField phi = init_level_set(20, 20, DiskRegion{10, 10, 5}, 2.0);
  const BinaryMask m = mask_from_phi(phi);
  for (int y = 0; y < 20; ++y)
    for (int x = 0; x < 20; ++x) {
      const double d2 = (x - 10.0) * (x - 10.0) + (y - 10.0) * (y - 10.0);
      if (phi.at(x, y) == 2.0) EXPECT_TRUE(m.at(x, y));
      if (d2 > 25.0) EXPECT_FALSE(m.at(x, y));
    }
}

TEST(Init, Errors) {
  EXPECT_THROW(init_level_set(16, 16, DiskRegion{8, 8, 0}, 2.0), InvalidParameter);
  EXPECT_THROW(init_level_set(16, 16, RectRegion{0, 0, 0, 4}, 2.0), InvalidParameter);
  EXPECT_THROW(init_level_set(16, 16, RectRegion{10, 10, 10, 4}, 2.0), InvalidParameter);
  EXPECT_THROW(init_level_set(16, 16, RectRegion{0, 0, 16, 16}, 2.0), InvalidParameter);
  EXPECT_THROW(init_level_set(16, 16, RectRegion{2, 2, 4, 4}, 0.0), InvalidParameter);
  EXPECT_THROW(init_level_set(16, 16, BinaryMask(8, 8, true), 2.0), InvalidParameter);
}

TEST(Heaviside, Examples) {
  EXPECT_DOUBLE_EQ(heaviside(0.0, 0.7), 0.5);
  EXPECT_NEAR(heaviside(1.5, 1.5), 0.75, 1e-15);
  EXPECT_NEAR(heaviside(-1.5, 1.5), 0.25, 1e-15);
  EXPECT_NEAR(heaviside(1e12, 1.5), 1.0, 1e-12);
}

TEST(Heaviside, ComplementIdentity) {
  for (double eps : {0.5, 1.5, 3.0})
    for (double x = -10; x <= 10; x += 0.37) EXPECT_NEAR(heaviside(x, eps) + heaviside(-x, eps), 1.0, 1e-12);
}

TEST(Dirac, Examples) {
  EXPECT_NEAR(dirac(0.0, 1.5), 1.0 / (1.5 * std::numbers::pi), 1e-15);
  EXPECT_NEAR(dirac(0.0, 1.5), 0.212207, 1e-6);
  EXPECT_NEAR(dirac(1.5, 1.5), 0.106103, 1e-6);
  for (double x = 0; x < 20; x += 0.5) EXPECT_EQ(dirac(x, 1.5), dirac(-x, 1.5));
}

TEST(Dirac, IsDerivativeOfHeaviside) {
  const double h = 1e-5;
  for (double eps : {0.5, 1.5, 3.0})
    for (double x = -10; x <= 10; x += 0.05) {
      const double fd = (heaviside(x + h, eps) - heaviside(x - h, eps)) / (2 * h);
      EXPECT_NEAR(fd, dirac(x, eps), 1e-6) << "x=" << x << " eps=" << eps;
    }
}

TEST(Dirac, IntegratesToAboutOne) {
  for (double eps : {0.5, 1.5, 3.0}) {
    const int n = 200000;
    const double a = -50 * eps, b = 50 * eps, dx = (b - a) / n;
    double sum = 0.5 * (dirac(a, eps) + dirac(b, eps));
    for (int i = 1; i < n; ++i) sum += dirac(a + i * dx, eps);
    sum *= dx;
    EXPECT_GE(sum, 0.98);
    EXPECT_LE(sum, 1.0);
  }
}

TEST(FieldOverloads, MatchScalar) {
  const LevelSetField phi = circle_field(9, 3);
  const Raster H = heaviside(phi, 1.5), D = dirac(phi, 1.5);
  for (int y = 0; y < 9; ++y)
    for (int x = 0; x < 9; ++x) {
      EXPECT_EQ(H.at(x, y), heaviside(phi.at(x, y), 1.5));
      EXPECT_EQ(D.at(x, y), dirac(phi.at(x, y), 1.5));
    }
}

TEST(Curvature, StraightLineIsFlat) {
  LevelSetField phi(41, 41);
  for (int y = 0; y < 41; ++y)
    for (int x = 0; x < 41; ++x) phi.at(x, y) = 0.6 * x - 0.8 * y + 3.1;  // unit normal
  const Raster k = curvature(phi);
  for (int y = 2; y < 39; ++y)
    for (int x = 2; x < 39; ++x) EXPECT_LT(std::abs(k.at(x, y)), 1e-6);
}

TEST(Curvature, CircleOfRadius20) {
  const int n = 101;
  const LevelSetField phi = circle_field(n, 20);
  const Raster k = curvature(phi);
  int checked = 0;
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x)
      if (std::abs(phi.at(x, y)) < 1.0) {
        EXPECT_NEAR(k.at(x, y), 0.05, 0.01);
        ++checked;
      }
  EXPECT_GT(checked, 100);
}

TEST(Curvature, OddUnderSignFlip) {
  const LevelSetField phi = circle_field(31, 9, 1.7);
  const Raster a = curvature(phi), b = curvature(-phi);
  for (std::size_t i = 0; i < a.pixel_count(); ++i) EXPECT_NEAR(a.plane()[i], -b.plane()[i], 1e-9);
}

TEST(Curvature, ErrorShrinksWithRadius) {
  const int n = 161;
  double prev = 1e9;
  for (double R : {10.0, 20.0, 40.0}) {
    const LevelSetField phi = circle_field(n, R);
    const Raster k = curvature(phi);
    double err = 0;
    int count = 0;
    for (int y = 0; y < n; ++y)
      for (int x = 0; x < n; ++x)
        if (std::abs(phi.at(x, y)) < 0.5) {
          err += std::abs(k.at(x, y) - 1.0 / R);
          ++count;
        }
    err /= count;
    EXPECT_LT(err, prev) << "R=" << R;
    prev = err;
  }
}

TEST(Curvature, ConstantFieldGivesZero) {
  const LevelSetField phi(10, 10, 3.0);
  const Raster k = curvature(phi), reg = distance_regularizer(phi);
  for (double v : k.plane()) EXPECT_EQ(v, 0.0);
  for (double v : reg.plane()) EXPECT_EQ(v, 0.0);
}

TEST(DistanceRegularizer, VanishesOnSignedDistance) {
  const int n = 101;
  const LevelSetField phi = circle_field(n, 25);
  const Raster f = distance_regularizer(phi);
  for (int y = 3; y < n - 3; ++y)
    for (int x = 3; x < n - 3; ++x)
      if (radius_at(n, x, y) > 8) EXPECT_LT(std::abs(f.at(x, y)), 0.05) << x << "," << y;
}

TEST(DistanceRegularizer, ScaledDistanceRelaxes) {
  // phi = 2 (r - R): laplacian 2/r, curvature 1/r, so the force is 1/r,
  // which lowers phi outside-in where |grad phi| = 2 is too steep.
  const int n = 101;
  const LevelSetField phi = circle_field(n, 25, 2.0);
  const Raster f = distance_regularizer(phi);
  for (int y = 3; y < n - 3; ++y)
    for (int x = 3; x < n - 3; ++x) {
      const double r = radius_at(n, x, y);
      if (r > 10 && r < 45) {
        EXPECT_NEAR(f.at(x, y), 1.0 / r, 0.05 / r) << x << "," << y;
        EXPECT_GT(f.at(x, y), 0.0);
      }
    }
}

TEST(LengthForce, ZeroWeightOrFlatInterface) {
  const LevelSetField circle = circle_field(41, 10);
  const Raster off = length_force(circle, 1.5, 0.0);
  for (double v : off.plane()) EXPECT_EQ(v, 0.0);
  LevelSetField line(41, 41);
  for (int y = 0; y < 41; ++y)
    for (int x = 0; x < 41; ++x) line.at(x, y) = x - 20.3;
  const Raster straight = length_force(line, 1.5, 65.025);
  for (double v : straight.plane()) EXPECT_LT(std::abs(v), 1e-9);
}

TEST(LengthForce, CircleRadius20) {
  const int n = 101;
  const LevelSetField phi = circle_field(n, 20);
  const Raster f = length_force(phi, 1.5, 0.001 * 255 * 255);
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x)
      if (std::abs(phi.at(x, y)) < 0.25) EXPECT_NEAR(f.at(x, y), 0.690, 0.1);
}

TEST(Mask, FromPhi) {
  EXPECT_EQ(mask_from_phi(LevelSetField(5, 5, -1.0)).count(), 0u);
  EXPECT_EQ(mask_from_phi(LevelSetField(5, 5, 0.0)).count(), 0u);
  EXPECT_EQ(mask_from_phi(LevelSetField(5, 5, 0.1)).count(), 25u);
}

TEST(Gradient, CentralDifferences) {
  Raster f(5, 5);
  for (int y = 0; y < 5; ++y)
    for (int x = 0; x < 5; ++x) f.at(x, y) = x * x + 3 * y;
  auto [gx, gy] = gradient(f);
  EXPECT_DOUBLE_EQ(gx.at(2, 2), 4.0);
  EXPECT_DOUBLE_EQ(gy.at(2, 2), 3.0);
  EXPECT_DOUBLE_EQ(gx.at(0, 2), 0.5);  // replicated left edge
  EXPECT_DOUBLE_EQ(laplacian(f).at(2, 2), 2.0);
}
