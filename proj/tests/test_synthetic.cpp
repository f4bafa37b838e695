#include <gtest/gtest.h>

#include <cmath>

#include "levelseg/config.hpp"
#include "levelseg/synthetic.hpp"

using namespace levelseg;

TEST(Synthetic, DiskTruthMatchesRenderedArea) {
  SceneSpec spec;
  spec.width = spec.height = 64;
  spec.background = 50;
  spec.shapes.push_back({ShapeKind::disk, {31.5, 31.5, 20}, 200});
  const SyntheticScene s = make_synthetic(spec);
  std::size_t bright = 0;
  for (double v : s.image.plane()) bright += v == 200.0;
  EXPECT_EQ(s.truth.count(), bright);
  for (double v : s.image.plane()) EXPECT_TRUE(v == 200.0 || v == 50.0);
  // Area of a radius-20 disk on the pixel-center lattice is close to pi r^2.
  EXPECT_NEAR(double(bright), M_PI * 400, 40);
}

TEST(Synthetic, SixBlobsSixComponents) {
  SceneSpec spec;
  spec.width = spec.height = 64;
  const double radius[6] = {10, 9, 7, 7, 7, 7};
  for (int i = 0; i < 6; ++i)
    spec.shapes.push_back({ShapeKind::disk, {11.5 + 20.0 * (i % 3), 19.5 + 24.0 * (i / 3), radius[i]}, 40.0 + 40.0 * i});
  const SyntheticScene s = make_synthetic(spec);
  EXPECT_EQ(count_components(s.truth), 6);
}

TEST(Synthetic, BiasMakesBlobsInhomogeneous) {
  SceneSpec spec;
  spec.width = spec.height = 48;
  spec.background = 40;
  spec.shapes.push_back({ShapeKind::rectangle, {8, 8, 32, 32}, 150});
  spec.bias = {BiasKind::linear, 0.3, 0.0};
  const SyntheticScene s = make_synthetic(spec);
  double mean = 0, var = 0;
  std::size_t n = 0;
  for (int y = 0; y < 48; ++y)
    for (int x = 0; x < 48; ++x)
      if (s.truth.at(x, y)) {
        mean += s.image.at(x, y);
        ++n;
      }
  mean /= n;
  for (int y = 0; y < 48; ++y)
    for (int x = 0; x < 48; ++x)
      if (s.truth.at(x, y)) var += (s.image.at(x, y) - mean) * (s.image.at(x, y) - mean);
  EXPECT_GT(var / n, 0.0);
}

TEST(Synthetic, RadialBiasPeaksAtCenter) {
  const Raster b = bias_field(33, 33, {BiasKind::radial, 0.5, 0.0});
  EXPECT_NEAR(b.at(16, 16), 1.5, 1e-12);
  EXPECT_NEAR(b.at(0, 0), 0.5, 1e-12);
}

TEST(Synthetic, LaterShapesWinAndStarIsStarShaped) {
  SceneSpec spec;
  spec.width = spec.height = 40;
  spec.shapes.push_back({ShapeKind::rectangle, {0, 0, 20, 40}, 100});
  spec.shapes.push_back({ShapeKind::star, {19.5, 19.5, 15, 6, 5, 0}, 220});
  const SyntheticScene s = make_synthetic(spec);
  EXPECT_EQ(s.image.at(19, 19), 220);
  EXPECT_EQ(s.image.at(2, 2), 100);
  // The tip straight up is inside.
  EXPECT_TRUE(rasterize_shape(40, 40, spec.shapes[1]).at(19, 7));
  // Pixel count tracks the polygon area n R r sin(pi / n).
  EXPECT_NEAR(double(rasterize_shape(40, 40, spec.shapes[1]).count()), 5 * 15 * 6 * std::sin(M_PI / 5), 15);
}

TEST(Synthetic, Errors) {
  SceneSpec spec;
  EXPECT_THROW(make_synthetic(spec), InvalidParameter);
  spec.shapes.push_back({ShapeKind::disk, {1, 2}, 10});
  EXPECT_THROW(make_synthetic(spec), InvalidParameter);
}

TEST(SceneJson, RoundTrip) {
  SceneSpec spec;
  spec.width = 50;
  spec.height = 40;
  spec.background = 12;
  spec.shapes.push_back({ShapeKind::star, {20, 20, 10, 4, 6, 0.3}, 200});
  spec.shapes.push_back({ShapeKind::rectangle, {1, 2, 3, 4}, 90});
  spec.bias = {BiasKind::radial, 0.2, 0.0};
  const SceneSpec back = scene_from_json(scene_to_json(spec));
  EXPECT_EQ(make_synthetic(back).image, make_synthetic(spec).image);
  EXPECT_EQ(back.shapes.size(), 2u);
  EXPECT_EQ(back.bias.kind, BiasKind::radial);
}

TEST(SceneJson, DefaultsAndErrors) {
  const SceneSpec s = scene_from_json(Json::parse(R"({"shapes":[{"params":[5,5,3]}]})"));
  EXPECT_EQ(s.width, 64);
  EXPECT_EQ(s.shapes[0].kind, ShapeKind::disk);
  EXPECT_THROW(scene_from_json(Json::parse(R"({"widht":5})")), InvalidParameter);
  EXPECT_THROW(scene_from_json(Json::parse(R"({"shapes":[{"kind":"blob"}]})")), InvalidParameter);
  EXPECT_THROW(scene_from_json(Json::parse(R"({"width":"wide"})")), InvalidParameter);
}

TEST(ParamsJson, OverridesAndDefaults) {
  const ModelParams p = params_from_json(Json::parse(R"({"dt":0.05,"max_iters":20})"));
  EXPECT_EQ(p.dt, 0.05);
  EXPECT_EQ(p.max_iters, 20);
  EXPECT_EQ(p.eps, 1.5);
  EXPECT_EQ(params_from_json(params_to_json(p)).dt, 0.05);
  EXPECT_THROW(params_from_json(Json::parse(R"({"dtt":1})")), InvalidParameter);
  EXPECT_THROW(params_from_json(Json::parse(R"({"dt":-1})")), InvalidParameter);
}

TEST(SeedJson, Forms) {
  const RegionSpec r = region_from_json(Json::parse(R"({"rect":[1,2,3,4]})"));
  EXPECT_EQ(std::get<RectRegion>(r).height, 4);
  const RegionSpec d = region_from_json(Json::parse(R"({"disk":[5.5,6,7]})"));
  EXPECT_EQ(std::get<DiskRegion>(d).cx, 5.5);
  EXPECT_EQ(std::get<DiskRegion>(region_from_json(region_to_json(d))).radius, 7);
  EXPECT_THROW(region_from_json(Json::parse(R"({"rect":[1,2]})")), InvalidParameter);
  EXPECT_THROW(region_from_json(Json::parse(R"({"rect":[1,2,3,4],"disk":[1,1,1]})")), InvalidParameter);
}
