#pragma once

// Level-set embedding, regularized Heaviside/Dirac, differential operators
// and the regularization forces shared by every model.
//
// Sign convention: phi > 0 inside the segmented region, so H(phi) -> 1 marks
// the foreground.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "levelseg/raster.hpp"

namespace levelseg {

class BinaryMask {
 public:
  BinaryMask() = default;
  BinaryMask(int width, int height, bool fill = false)
      : width_(width), height_(height),
        bits_(static_cast<std::size_t>(width) * height, fill ? 1 : 0) {
    if (width < 1 || height < 1) throw InvalidParameter("mask dimensions must be positive");
  }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return bits_.size(); }

  bool at(int x, int y) const noexcept { return bits_[static_cast<std::size_t>(y) * width_ + x] != 0; }
  void set(int x, int y, bool v = true) noexcept {
    bits_[static_cast<std::size_t>(y) * width_ + x] = v ? 1 : 0;
  }
  bool operator[](std::size_t i) const noexcept { return bits_[i] != 0; }

  std::size_t count() const noexcept {
    std::size_t n = 0;
    for (auto b : bits_) n += b;
    return n;
  }

  bool same_grid(const BinaryMask& o) const noexcept {
    return width_ == o.width_ && height_ == o.height_;
  }

  const std::vector<std::uint8_t>& bits() const noexcept { return bits_; }

  bool operator==(const BinaryMask&) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> bits_;
};

// The embedding function phi. Thin strong type over a single-channel raster.
class LevelSetField {
 public:
  LevelSetField() = default;
  LevelSetField(int width, int height, double fill = 0.0) : values_(width, height, 1, fill) {}
  explicit LevelSetField(Raster values) : values_(std::move(values)) {
    if (values_.channels() != 1) throw InvalidParameter("level set field must be single-channel");
  }

  int width() const noexcept { return values_.width(); }
  int height() const noexcept { return values_.height(); }
  std::size_t pixel_count() const noexcept { return values_.pixel_count(); }

  double& at(int x, int y) noexcept { return values_.at(x, y); }
  double at(int x, int y) const noexcept { return values_.at(x, y); }
  double clamped(int x, int y) const noexcept { return values_.clamped(x, y); }

  std::span<double> samples() & noexcept { return values_.plane(); }
  std::span<const double> samples() const& noexcept { return values_.plane(); }
  std::span<const double> samples() const&& = delete;

  const Raster& values() const& noexcept { return values_; }
  Raster& values() & noexcept { return values_; }
  Raster values() && noexcept { return std::move(values_); }

  LevelSetField operator-() const {
    LevelSetField out = *this;
    for (double& v : out.samples()) v = -v;
    return out;
  }

  bool operator==(const LevelSetField&) const = default;

 private:
  Raster values_;
};

struct RectRegion {
  int x0 = 0, y0 = 0, width = 0, height = 0;
};

struct DiskRegion {
  double cx = 0, cy = 0, radius = 0;
};

using RegionSpec = std::variant<RectRegion, DiskRegion, BinaryMask>;

namespace detail {

inline BinaryMask rasterize_region(int width, int height, const RegionSpec& region) {
  BinaryMask m(width, height);
  if (const auto* r = std::get_if<RectRegion>(&region)) {
    if (r->width <= 0 || r->height <= 0) throw InvalidParameter("seed rectangle is empty");
    if (r->x0 < 0 || r->y0 < 0 || r->x0 + r->width > width || r->y0 + r->height > height)
      throw InvalidParameter("seed rectangle leaves the grid");
    for (int y = r->y0; y < r->y0 + r->height; ++y)
      for (int x = r->x0; x < r->x0 + r->width; ++x) m.set(x, y);
  } else if (const auto* d = std::get_if<DiskRegion>(&region)) {
    if (!(d->radius > 0.0)) throw InvalidParameter("seed disk radius must be > 0");
    if (d->cx - d->radius < -0.5 || d->cy - d->radius < -0.5 || d->cx + d->radius > width - 0.5 ||
        d->cy + d->radius > height - 0.5)
      throw InvalidParameter("seed disk leaves the grid");
    for (int y = 0; y < height; ++y)
      for (int x = 0; x < width; ++x) {
        const double dx = x - d->cx, dy = y - d->cy;
        if (dx * dx + dy * dy <= d->radius * d->radius) m.set(x, y);
      }
  } else {
    const auto& given = std::get<BinaryMask>(region);
    if (given.width() != width || given.height() != height)
      throw InvalidParameter("seed mask dimensions do not match the grid");
    m = given;
  }
  return m;
}

}  // namespace detail

// Piecewise-constant initialization: +p strictly inside the seed, -p outside,
// 0 on region pixels that have a 4-neighbor outside the region.
inline LevelSetField init_level_set(int width, int height, const RegionSpec& seed, double p) {
  if (!(p > 0.0)) throw InvalidParameter("initial level-set height p must be > 0");
  const BinaryMask region = detail::rasterize_region(width, height, seed);
  const std::size_t n = region.count();
  if (n == 0) throw InvalidParameter("seed region is empty");
  if (n == region.size()) throw InvalidParameter("seed region covers the whole image");

  LevelSetField phi(width, height, -p);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      if (!region.at(x, y)) continue;
      bool edge = false;
      constexpr int off[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
      for (const auto& o : off) {
        const int nx = x + o[0], ny = y + o[1];
        if (nx >= 0 && ny >= 0 && nx < width && ny < height && !region.at(nx, ny)) edge = true;
      }
      phi.at(x, y) = edge ? 0.0 : p;
    }
  return phi;
}

inline double heaviside(double phi, double eps) {
  return 0.5 * (1.0 + (2.0 / std::numbers::pi) * std::atan(phi / eps));
}

inline double dirac(double phi, double eps) {
  return eps / (std::numbers::pi * (phi * phi + eps * eps));
}

inline Raster heaviside(const LevelSetField& phi, double eps) {
  Raster out(phi.width(), phi.height());
  auto src = phi.samples();
  auto dst = out.plane();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = heaviside(src[i], eps);
  return out;
}

inline Raster dirac(const LevelSetField& phi, double eps) {
  Raster out(phi.width(), phi.height());
  auto src = phi.samples();
  auto dst = out.plane();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = dirac(src[i], eps);
  return out;
}

// Central-difference gradient, replicated boundaries, h = 1.
inline std::pair<Raster, Raster> gradient(const Raster& f) {
  Raster gx(f.width(), f.height()), gy(f.width(), f.height());
  for (int y = 0; y < f.height(); ++y)
    for (int x = 0; x < f.width(); ++x) {
      gx.at(x, y) = 0.5 * (f.clamped(x + 1, y) - f.clamped(x - 1, y));
      gy.at(x, y) = 0.5 * (f.clamped(x, y + 1) - f.clamped(x, y - 1));
    }
  return {std::move(gx), std::move(gy)};
}

// 5-point Laplacian, replicated boundaries.
inline Raster laplacian(const Raster& f) {
  Raster out(f.width(), f.height());
  for (int y = 0; y < f.height(); ++y)
    for (int x = 0; x < f.width(); ++x)
      out.at(x, y) = f.clamped(x + 1, y) + f.clamped(x - 1, y) + f.clamped(x, y + 1) +
                     f.clamped(x, y - 1) - 4.0 * f.at(x, y);
  return out;
}

inline constexpr double kGradientFloor = 1e-10;

// div(grad phi / |grad phi|), |grad phi| floored at 1e-10.
inline Raster curvature(const LevelSetField& phi) {
  auto [gx, gy] = gradient(phi.values());
  auto nx = gx.plane(), ny = gy.plane();
  for (std::size_t i = 0; i < nx.size(); ++i) {
    const double mag = std::max(std::hypot(nx[i], ny[i]), kGradientFloor);
    nx[i] /= mag;
    ny[i] /= mag;
  }
  Raster out(phi.width(), phi.height());
  for (int y = 0; y < phi.height(); ++y)
    for (int x = 0; x < phi.width(); ++x)
      out.at(x, y) = 0.5 * (gx.clamped(x + 1, y) - gx.clamped(x - 1, y)) +
                     0.5 * (gy.clamped(x, y + 1) - gy.clamped(x, y - 1));
  return out;
}

// Gradient flow of the signed-distance penalty: laplacian(phi) - curvature(phi).
inline Raster distance_regularizer(const LevelSetField& phi) {
  Raster out = laplacian(phi.values());
  const Raster k = curvature(phi);
  auto dst = out.plane();
  auto kv = k.plane();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] -= kv[i];
  return out;
}

// nu * dirac(phi) * curvature(phi).
inline Raster length_force(const LevelSetField& phi, double eps, double nu) {
  Raster out = curvature(phi);
  auto dst = out.plane();
  auto src = phi.samples();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] *= nu * dirac(src[i], eps);
  return out;
}

inline BinaryMask mask_from_phi(const LevelSetField& phi) {
  BinaryMask m(phi.width(), phi.height());
  for (int y = 0; y < phi.height(); ++y)
    for (int x = 0; x < phi.width(); ++x) m.set(x, y, phi.at(x, y) > 0.0);
  return m;
}

}  // namespace levelseg
