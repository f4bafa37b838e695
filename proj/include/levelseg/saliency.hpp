#pragma once

// Frequency-tuned saliency: distance between the image-wide mean and a
// Gaussian-blurred copy of the image, per pixel.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <utility>

#include "levelseg/raster.hpp"

namespace levelseg {

struct SaliencyPreset {
  double sigma = 0.5;
  int ksize = 5;
};

inline constexpr SaliencyPreset kLocalFittingSaliency{0.5, 5};
inline constexpr SaliencyPreset kSdrelSaliency{0.8, 3};

// Non-negative map rescaled to [0, 255]; an identically zero map stays zero.
class SaliencyMap {
 public:
  SaliencyMap() = default;
  explicit SaliencyMap(Raster values) : values_(std::move(values)) {
    if (values_.channels() != 1) throw InvalidParameter("saliency map must be single-channel");
  }

  int width() const noexcept { return values_.width(); }
  int height() const noexcept { return values_.height(); }
  double at(int x, int y) const noexcept { return values_.at(x, y); }
  const Raster& values() const& noexcept { return values_; }
  Raster values() && noexcept { return std::move(values_); }

 private:
  Raster values_;
};

inline constexpr double kFlatSaliencyRatio = 1e-12;

// A peak below kFlatSaliencyRatio * scale is rounding residue (a flat image):
// the map is zeroed rather than blown up to 255.
inline Raster normalize_to_255(Raster s, double scale = 0.0) {
  auto v = s.plane();
  const double peak = v.empty() ? 0.0 : *std::max_element(v.begin(), v.end());
  if (peak <= kFlatSaliencyRatio * std::max(1.0, scale)) {
    std::fill(v.begin(), v.end(), 0.0);
    return s;
  }
  for (double& x : v) x = std::max(0.0, x) * (255.0 / peak);
  return s;
}

inline double max_abs_sample(const Raster& r) {
  double m = 0.0;
  for (int c = 0; c < r.channels(); ++c)
    for (double v : r.plane(c)) m = std::max(m, std::abs(v));
  return m;
}

// |mean(I) - (G_sigma * I)(x)| before normalization.
inline Raster saliency_gray_raw(const Raster& img, SaliencyPreset preset = kLocalFittingSaliency) {
  if (img.channels() != 1) throw InvalidParameter("saliency_gray expects a single-channel raster");
  const auto samples = img.plane();
  const double mean =
      std::accumulate(samples.begin(), samples.end(), 0.0) / static_cast<double>(samples.size());
  Raster s = convolve2d(img, gaussian_kernel(preset.sigma, preset.ksize));
  for (double& v : s.plane()) v = std::abs(mean - v);
  return s;
}

inline SaliencyMap saliency_gray(const Raster& img, SaliencyPreset preset = kLocalFittingSaliency) {
  return SaliencyMap(normalize_to_255(saliency_gray_raw(img, preset), max_abs_sample(img)));
}

// ||mean Lab vector - blurred Lab vector||_2 before normalization.
inline Raster saliency_color_raw(const Raster& lab, SaliencyPreset preset = kLocalFittingSaliency) {
  if (lab.channels() != 3) throw InvalidParameter("saliency_color expects a 3-channel Lab raster");
  const Kernel g = gaussian_kernel(preset.sigma, preset.ksize);
  Raster s(lab.width(), lab.height());
  auto out = s.plane();
  for (int c = 0; c < 3; ++c) {
    const auto plane = lab.plane(c);
    const double mean =
        std::accumulate(plane.begin(), plane.end(), 0.0) / static_cast<double>(plane.size());
    const Raster blurred = convolve2d(lab.channel(c), g);
    const auto bv = blurred.plane();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += (mean - bv[i]) * (mean - bv[i]);
  }
  for (double& v : out) v = std::sqrt(v);
  return s;
}

inline SaliencyMap saliency_color(const Raster& lab, SaliencyPreset preset = kLocalFittingSaliency) {
  return SaliencyMap(normalize_to_255(saliency_color_raw(lab, preset), max_abs_sample(lab)));
}

}  // namespace levelseg
