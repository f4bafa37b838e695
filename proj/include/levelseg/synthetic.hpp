#pragma once

// Synthetic scenes with exact ground truth: disks, rectangles and star
// polygons over a flat background, with an optional smooth multiplicative
// bias field to emulate intensity inhomogeneity.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "levelseg/levelset.hpp"
#include "levelseg/raster.hpp"

namespace levelseg {

enum class ShapeKind { disk, rectangle, star };

struct ShapeSpec {
  ShapeKind kind = ShapeKind::disk;
  // disk: cx, cy, radius. rectangle: x0, y0, width, height.
  // star: cx, cy, outer radius, inner radius, points, rotation (radians).
  std::vector<double> params;
  double intensity = 255.0;
};

enum class BiasKind { none, linear, radial };

// Multiplier 1 + strength * t, with t in [-1, 1]. Linear: t runs along the
// direction `angle` across the image. Radial: t = 1 at the center, -1 at the
// farthest corner.
struct BiasSpec {
  BiasKind kind = BiasKind::none;
  double strength = 0.0;
  double angle = 0.0;
};

struct SceneSpec {
  int width = 64;
  int height = 64;
  double background = 0.0;
  std::vector<ShapeSpec> shapes;
  BiasSpec bias;
};

struct SyntheticScene {
  Raster image;
  BinaryMask truth;
};

namespace detail {

inline void require_params(const ShapeSpec& s, std::size_t n, const char* what) {
  if (s.params.size() < n)
    throw InvalidParameter(std::string(what) + " needs " + std::to_string(n) + " params");
}

inline std::vector<std::pair<double, double>> star_polygon(const ShapeSpec& s) {
  const double cx = s.params[0], cy = s.params[1], outer = s.params[2], inner = s.params[3];
  const int points = s.params.size() > 4 ? static_cast<int>(s.params[4]) : 5;
  const double rot = s.params.size() > 5 ? s.params[5] : 0.0;
  if (points < 2 || !(outer > 0) || !(inner > 0)) throw InvalidParameter("invalid star parameters");
  std::vector<std::pair<double, double>> poly;
  for (int i = 0; i < 2 * points; ++i) {
    const double r = i % 2 == 0 ? outer : inner;
    const double a = rot - std::numbers::pi / 2 + i * std::numbers::pi / points;
    poly.emplace_back(cx + r * std::cos(a), cy + r * std::sin(a));
  }
  return poly;
}

// Even-odd rule.
inline bool inside_polygon(const std::vector<std::pair<double, double>>& poly, double x, double y) {
  bool in = false;
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    const auto [xi, yi] = poly[i];
    const auto [xj, yj] = poly[j];
    if ((yi > y) != (yj > y) && x < (xj - xi) * (y - yi) / (yj - yi) + xi) in = !in;
  }
  return in;
}

}  // namespace detail

// Pixel-center coverage of one shape.
inline BinaryMask rasterize_shape(int width, int height, const ShapeSpec& s) {
  BinaryMask m(width, height);
  switch (s.kind) {
    case ShapeKind::disk: {
      detail::require_params(s, 3, "disk");
      const double cx = s.params[0], cy = s.params[1], r = s.params[2];
      for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x)
          if ((x - cx) * (x - cx) + (y - cy) * (y - cy) <= r * r) m.set(x, y);
      break;
    }
    case ShapeKind::rectangle: {
      detail::require_params(s, 4, "rectangle");
      const double x0 = s.params[0], y0 = s.params[1], w = s.params[2], h = s.params[3];
      for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x)
          if (x >= x0 && x < x0 + w && y >= y0 && y < y0 + h) m.set(x, y);
      break;
    }
    case ShapeKind::star: {
      detail::require_params(s, 4, "star");
      const auto poly = detail::star_polygon(s);
      for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x)
          if (detail::inside_polygon(poly, x, y)) m.set(x, y);
      break;
    }
  }
  return m;
}

inline Raster bias_field(int width, int height, const BiasSpec& bias) {
  Raster b(width, height, 1, 1.0);
  if (bias.kind == BiasKind::none || bias.strength == 0.0) return b;
  const double cx = (width - 1) / 2.0, cy = (height - 1) / 2.0;
  const double ux = std::cos(bias.angle), uy = std::sin(bias.angle);
  const double reach = std::abs(ux) * cx + std::abs(uy) * cy;
  const double corner = std::hypot(cx, cy);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      double t = 0.0;
      if (bias.kind == BiasKind::linear)
        t = reach > 0 ? ((x - cx) * ux + (y - cy) * uy) / reach : 0.0;
      else
        t = 1.0 - 2.0 * std::hypot(x - cx, y - cy) / corner;
      b.at(x, y) = 1.0 + bias.strength * t;
    }
  return b;
}

inline SyntheticScene make_synthetic(const SceneSpec& spec) {
  if (spec.shapes.empty()) throw InvalidParameter("scene has no shapes");
  SyntheticScene scene{Raster(spec.width, spec.height, 1, spec.background),
                       BinaryMask(spec.width, spec.height)};
  for (const ShapeSpec& s : spec.shapes) {
    const BinaryMask cover = rasterize_shape(spec.width, spec.height, s);
    for (int y = 0; y < spec.height; ++y)
      for (int x = 0; x < spec.width; ++x)
        if (cover.at(x, y)) {
          scene.image.at(x, y) = s.intensity;
          scene.truth.set(x, y);
        }
  }
  const Raster b = bias_field(spec.width, spec.height, spec.bias);
  auto iv = scene.image.plane();
  auto bv = b.plane();
  for (std::size_t i = 0; i < iv.size(); ++i) iv[i] = std::clamp(iv[i] * bv[i], 0.0, 255.0);
  return scene;
}

// 4-connected components of the foreground.
inline int count_components(const BinaryMask& m) {
  std::vector<int> label(m.size(), 0);
  int n = 0;
  std::vector<std::pair<int, int>> stack;
  for (int y = 0; y < m.height(); ++y)
    for (int x = 0; x < m.width(); ++x) {
      if (!m.at(x, y) || label[static_cast<std::size_t>(y) * m.width() + x]) continue;
      ++n;
      stack.emplace_back(x, y);
      label[static_cast<std::size_t>(y) * m.width() + x] = n;
      while (!stack.empty()) {
        auto [cx, cy] = stack.back();
        stack.pop_back();
        constexpr int off[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
        for (const auto& o : off) {
          const int nx = cx + o[0], ny = cy + o[1];
          if (nx < 0 || ny < 0 || nx >= m.width() || ny >= m.height() || !m.at(nx, ny)) continue;
          auto& l = label[static_cast<std::size_t>(ny) * m.width() + nx];
          if (l) continue;
          l = n;
          stack.emplace_back(nx, ny);
        }
      }
    }
  return n;
}

}  // namespace levelseg
