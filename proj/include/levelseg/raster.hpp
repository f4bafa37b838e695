#pragma once

// Pixel containers, color conversion, Gaussian kernels and 2-D convolution.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace levelseg {

// Thrown for out-of-domain arguments (even kernel sizes, empty seeds, ...).
class InvalidParameter : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Planar real-valued image. Samples live in [0, 255] for intensity images
// (Lab rasters carry L in [0,100] and signed a/b). Each channel is a
// contiguous row-major plane.
class Raster {
 public:
  Raster() = default;

  Raster(int width, int height, int channels = 1, double fill = 0.0)
      : width_(width), height_(height), channels_(channels) {
    if (width < 3 || height < 3)
      throw InvalidParameter("raster must be at least 3x3, got " + std::to_string(width) + "x" +
                             std::to_string(height));
    if (channels != 1 && channels != 3)
      throw InvalidParameter("raster channels must be 1 or 3, got " + std::to_string(channels));
    data_.assign(static_cast<std::size_t>(width) * height * channels, fill);
  }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  int channels() const noexcept { return channels_; }
  std::size_t pixel_count() const noexcept { return static_cast<std::size_t>(width_) * height_; }
  bool empty() const noexcept { return data_.empty(); }

  double& at(int x, int y, int c = 0) noexcept { return data_[index(x, y, c)]; }
  double at(int x, int y, int c = 0) const noexcept { return data_[index(x, y, c)]; }

  // Edge-replicated read.
  double clamped(int x, int y, int c = 0) const noexcept {
    return at(std::clamp(x, 0, width_ - 1), std::clamp(y, 0, height_ - 1), c);
  }

  // Views into a temporary would dangle, so rvalues get no view.
  std::span<double> plane(int c = 0) & noexcept {
    return {data_.data() + static_cast<std::size_t>(c) * pixel_count(), pixel_count()};
  }
  std::span<const double> plane(int c = 0) const& noexcept {
    return {data_.data() + static_cast<std::size_t>(c) * pixel_count(), pixel_count()};
  }
  std::span<const double> plane(int c = 0) const&& = delete;

  std::vector<double>& samples() & noexcept { return data_; }
  const std::vector<double>& samples() const& noexcept { return data_; }
  const std::vector<double>& samples() const&& = delete;

  bool same_shape(const Raster& o) const noexcept {
    return width_ == o.width_ && height_ == o.height_ && channels_ == o.channels_;
  }
  bool same_grid(const Raster& o) const noexcept { return width_ == o.width_ && height_ == o.height_; }

  // Copies one channel out as a single-channel raster.
  Raster channel(int c) const {
    Raster out(width_, height_, 1);
    auto src = plane(c);
    std::copy(src.begin(), src.end(), out.plane().begin());
    return out;
  }

  bool operator==(const Raster&) const = default;

 private:
  std::size_t index(int x, int y, int c) const noexcept {
    return (static_cast<std::size_t>(c) * height_ + y) * width_ + x;
  }

  int width_ = 0;
  int height_ = 0;
  int channels_ = 0;
  std::vector<double> data_;
};

// Square odd-sized convolution kernel, weights row-major.
struct Kernel {
  int size = 1;
  std::vector<double> weights{1.0};

  int radius() const noexcept { return size / 2; }
  double at(int dx, int dy) const noexcept {
    return weights[static_cast<std::size_t>(dy + radius()) * size + (dx + radius())];
  }
};

inline Raster to_grayscale(const Raster& img) {
  if (img.channels() == 1) return img;
  Raster out(img.width(), img.height(), 1);
  auto r = img.plane(0), g = img.plane(1), b = img.plane(2);
  auto dst = out.plane();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = 0.299 * r[i] + 0.587 * g[i] + 0.114 * b[i];
  return out;
}

namespace detail {

inline double srgb_to_linear(double v255) {
  const double c = std::max(0.0, v255 / 255.0);
  return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
}

inline double lab_f(double t) {
  constexpr double delta = 6.0 / 29.0;
  return t > delta * delta * delta ? std::cbrt(t) : t / (3.0 * delta * delta) + 4.0 / 29.0;
}

}  // namespace detail

// sRGB (D65) to CIE 1976 L*a*b*.
inline Raster srgb_to_lab(const Raster& img) {
  if (img.channels() != 3) throw InvalidParameter("srgb_to_lab expects a 3-channel raster");
  // sRGB -> XYZ (D65). The white point is the row sums so gray maps to a = b = 0.
  constexpr double m[3][3] = {{0.4124564, 0.3575761, 0.1804375},
                              {0.2126729, 0.7151522, 0.0721750},
                              {0.0193339, 0.1191920, 0.9503041}};
  const double white[3] = {m[0][0] + m[0][1] + m[0][2], m[1][0] + m[1][1] + m[1][2],
                           m[2][0] + m[2][1] + m[2][2]};
  Raster out(img.width(), img.height(), 3);
  auto r = img.plane(0), g = img.plane(1), b = img.plane(2);
  auto L = out.plane(0), A = out.plane(1), B = out.plane(2);
  for (std::size_t i = 0; i < L.size(); ++i) {
    const double lin[3] = {detail::srgb_to_linear(r[i]), detail::srgb_to_linear(g[i]),
                           detail::srgb_to_linear(b[i])};
    double f[3];
    for (int k = 0; k < 3; ++k) {
      const double xyz = std::max(0.0, m[k][0] * lin[0] + m[k][1] * lin[1] + m[k][2] * lin[2]);
      f[k] = detail::lab_f(xyz / white[k]);
    }
    L[i] = 116.0 * f[1] - 16.0;
    A[i] = 500.0 * (f[0] - f[1]);
    B[i] = 200.0 * (f[1] - f[2]);
  }
  return out;
}

// Normalized isotropic Gaussian, weights proportional to exp(-(dx^2+dy^2)/(2 sigma^2)).
inline Kernel gaussian_kernel(double sigma, int size) {
  if (size < 1 || size % 2 == 0)
    throw InvalidParameter("kernel size must be odd and positive, got " + std::to_string(size));
  if (!(sigma > 0.0)) throw InvalidParameter("kernel sigma must be > 0");
  Kernel k;
  k.size = size;
  k.weights.assign(static_cast<std::size_t>(size) * size, 0.0);
  const int r = size / 2;
  double sum = 0.0;
  for (int dy = -r; dy <= r; ++dy)
    for (int dx = -r; dx <= r; ++dx) {
      const double w = std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
      k.weights[static_cast<std::size_t>(dy + r) * size + (dx + r)] = w;
      sum += w;
    }
  for (double& w : k.weights) w /= sum;
  return k;
}

// Half-width k of a truncated window: the largest integer strictly below sigma.
inline int truncated_half_width(double sigma) {
  const double fl = std::floor(sigma);
  return static_cast<int>(fl == sigma ? sigma - 1.0 : fl);
}

// Gaussian window of size (4k+1) x (4k+1) with std sigma.
inline Kernel truncated_window(double sigma) {
  if (!(sigma > 1.0)) throw InvalidParameter("truncated window needs sigma > 1");
  return gaussian_kernel(sigma, 4 * truncated_half_width(sigma) + 1);
}

// 2-D convolution of a single-channel field with edge replication.
inline Raster convolve2d(const Raster& field, const Kernel& kernel) {
  if (field.channels() != 1) throw InvalidParameter("convolve2d expects a single-channel raster");
  const int w = field.width(), h = field.height(), r = kernel.radius();
  const int pw = w + 2 * r;
  // Pad once with replicated borders so the inner loop is branch-free.
  std::vector<double> padded(static_cast<std::size_t>(pw) * (h + 2 * r));
  for (int y = -r; y < h + r; ++y)
    for (int x = -r; x < w + r; ++x)
      padded[static_cast<std::size_t>(y + r) * pw + (x + r)] = field.clamped(x, y);

  Raster out(w, h, 1);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int j = 0; j < kernel.size; ++j) {
        // out(x) = sum_k w(k) f(x - k): the kernel is flipped.
        const double* row = &padded[static_cast<std::size_t>(y + 2 * r - j) * pw + x + 2 * r];
        const double* wrow = &kernel.weights[static_cast<std::size_t>(j) * kernel.size];
        for (int i = 0; i < kernel.size; ++i) acc += wrow[i] * row[-i];
      }
      out.at(x, y) = acc;
    }
  return out;
}

// Per-channel convolution for multi-channel rasters.
inline Raster convolve_channels(const Raster& img, const Kernel& kernel) {
  if (img.channels() == 1) return convolve2d(img, kernel);
  Raster out(img.width(), img.height(), img.channels());
  for (int c = 0; c < img.channels(); ++c) {
    const Raster blurred = convolve2d(img.channel(c), kernel);
    std::copy(blurred.plane().begin(), blurred.plane().end(), out.plane(c).begin());
  }
  return out;
}

// I.i.d. zero-mean Gaussian noise, clamped to [0, 255]. Same seed, same output.
inline Raster add_gaussian_noise(const Raster& field, double sigma_n, std::uint64_t seed) {
  if (sigma_n < 0.0) throw InvalidParameter("noise sigma must be >= 0");
  if (sigma_n == 0.0) return field;
  Raster out = field;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, sigma_n);
  for (double& v : out.samples()) v = std::clamp(v + noise(rng), 0.0, 255.0);
  return out;
}

}  // namespace levelseg
