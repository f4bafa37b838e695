#pragma once

// PNG (8-bit gray/RGB) and binary PGM (P5) input/output, plus a raw
// little-endian dump of level-set fields. PNG support needs libpng at link
// time.

#include <png.h>

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "levelseg/levelset.hpp"
#include "levelseg/raster.hpp"

namespace levelseg {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Writes to a sibling temp file, then renames over the target.
inline void write_bytes_atomic(const std::filesystem::path& path, const void* data, std::size_t size) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out.write(static_cast<const char*>(data), static_cast<std::streamsize>(size));
    if (!out) throw IoError("short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

inline void write_text_atomic(const std::filesystem::path& path, const std::string& text) {
  write_bytes_atomic(path, text.data(), text.size());
}

inline std::uint8_t to_byte(double v) {
  return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 255.0)));
}

// Interleaved 8-bit samples of a planar raster.
inline std::vector<std::uint8_t> interleave_bytes(const Raster& img) {
  std::vector<std::uint8_t> out(img.pixel_count() * img.channels());
  for (int c = 0; c < img.channels(); ++c) {
    auto p = img.plane(c);
    for (std::size_t i = 0; i < p.size(); ++i) out[i * img.channels() + c] = to_byte(p[i]);
  }
  return out;
}

inline Raster deinterleave_bytes(const std::uint8_t* data, int width, int height, int channels) {
  Raster img(width, height, channels);
  for (int c = 0; c < channels; ++c) {
    auto p = img.plane(c);
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = data[i * channels + c];
  }
  return img;
}

// ---------------------------------------------------------------------------
// PNG

inline Raster decode_png(const std::vector<std::uint8_t>& bytes) {
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size()))
    throw IoError(std::string("png: ") + image.message);
  const bool color = (image.format & PNG_FORMAT_FLAG_COLOR) != 0;
  image.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  std::vector<std::uint8_t> buf(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, buf.data(), 0, nullptr)) {
    png_image_free(&image);
    throw IoError(std::string("png: ") + image.message);
  }
  return deinterleave_bytes(buf.data(), static_cast<int>(image.width), static_cast<int>(image.height),
                            color ? 3 : 1);
}

inline std::vector<std::uint8_t> encode_png(const Raster& img) {
  const auto pixels = interleave_bytes(img);
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(img.width());
  image.height = static_cast<png_uint_32>(img.height());
  image.format = img.channels() == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&image, nullptr, &size, 0, pixels.data(), 0, nullptr))
    throw IoError(std::string("png: ") + image.message);
  std::vector<std::uint8_t> out(size);
  if (!png_image_write_to_memory(&image, out.data(), &size, 0, pixels.data(), 0, nullptr))
    throw IoError(std::string("png: ") + image.message);
  out.resize(size);
  return out;
}

// ---------------------------------------------------------------------------
// PGM (P5, maxval <= 255)

inline Raster decode_pgm(const std::vector<std::uint8_t>& bytes) {
  std::size_t pos = 0;
  auto token = [&]() {
    std::string t;
    while (pos < bytes.size()) {
      const char ch = static_cast<char>(bytes[pos]);
      if (ch == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(static_cast<unsigned char>(ch))) {
        if (!t.empty()) break;
        ++pos;
        continue;
      } else {
        t += ch;
      }
      ++pos;
    }
    return t;
  };
  if (token() != "P5") throw IoError("pgm: only binary P5 files are supported");
  int width = 0, height = 0, maxval = 0;
  try {
    width = std::stoi(token());
    height = std::stoi(token());
    maxval = std::stoi(token());
  } catch (const std::exception&) {
    throw IoError("pgm: malformed header");
  }
  if (maxval <= 0 || maxval > 255) throw IoError("pgm: only 8-bit files are supported");
  ++pos;  // single whitespace after maxval
  const std::size_t n = static_cast<std::size_t>(width) * height;
  if (width <= 0 || height <= 0 || bytes.size() < pos + n) throw IoError("pgm: truncated pixel data");
  Raster img = deinterleave_bytes(bytes.data() + pos, width, height, 1);
  if (maxval != 255)
    for (double& v : img.plane()) v = v * 255.0 / maxval;
  return img;
}

inline std::vector<std::uint8_t> encode_pgm(const Raster& img) {
  if (img.channels() != 1) throw InvalidParameter("pgm output needs a single-channel raster");
  const std::string header = "P5\n" + std::to_string(img.width()) + " " + std::to_string(img.height()) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  const auto px = interleave_bytes(img);
  out.insert(out.end(), px.begin(), px.end());
  return out;
}

// ---------------------------------------------------------------------------
// File-level helpers

inline Raster read_image(const std::filesystem::path& path) {
  const auto bytes = read_bytes(path);
  static constexpr std::uint8_t png_sig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  if (bytes.size() >= 8 && std::equal(std::begin(png_sig), std::end(png_sig), bytes.begin()))
    return decode_png(bytes);
  if (bytes.size() >= 2 && bytes[0] == 'P' && bytes[1] == '5') return decode_pgm(bytes);
  throw IoError("unsupported image format: " + path.string());
}

inline void write_image(const std::filesystem::path& path, const Raster& img) {
  const auto ext = path.extension().string();
  const auto bytes = (ext == ".pgm") ? encode_pgm(img) : encode_png(img);
  write_bytes_atomic(path, bytes.data(), bytes.size());
}

inline Raster mask_to_raster(const BinaryMask& m) {
  Raster r(m.width(), m.height());
  auto p = r.plane();
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = m[i] ? 255.0 : 0.0;
  return r;
}

// Pixels brighter than mid-gray (first channel) are foreground.
inline BinaryMask raster_to_mask(const Raster& r) {
  BinaryMask m(r.width(), r.height());
  for (int y = 0; y < r.height(); ++y)
    for (int x = 0; x < r.width(); ++x) m.set(x, y, r.at(x, y) > 127.5);
  return m;
}

inline BinaryMask read_mask(const std::filesystem::path& path) { return raster_to_mask(read_image(path)); }

inline void write_mask(const std::filesystem::path& path, const BinaryMask& m) {
  write_image(path, mask_to_raster(m));
}

// Affine rescale of phi onto [0, 255] for viewing.
inline Raster phi_to_display(const LevelSetField& phi) {
  Raster r = phi.values();
  auto v = r.plane();
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  const double a = *lo, span = *hi - *lo;
  for (double& x : v) x = span > 0 ? (x - a) * 255.0 / span : 0.0;
  return r;
}

// Raw dump: uint32 width, uint32 height, then width*height doubles, all
// little-endian.
inline std::vector<std::uint8_t> encode_phi_raw(const LevelSetField& phi) {
  static_assert(std::endian::native == std::endian::little, "raw dumps assume a little-endian host");
  std::vector<std::uint8_t> out(8 + phi.pixel_count() * sizeof(double));
  const std::uint32_t dims[2] = {static_cast<std::uint32_t>(phi.width()),
                                 static_cast<std::uint32_t>(phi.height())};
  std::memcpy(out.data(), dims, 8);
  std::memcpy(out.data() + 8, phi.samples().data(), phi.pixel_count() * sizeof(double));
  return out;
}

inline LevelSetField decode_phi_raw(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 8) throw IoError("raw phi: missing header");
  std::uint32_t dims[2];
  std::memcpy(dims, bytes.data(), 8);
  const std::size_t n = std::size_t(dims[0]) * dims[1];
  if (bytes.size() != 8 + n * sizeof(double)) throw IoError("raw phi: size does not match header");
  LevelSetField phi(static_cast<int>(dims[0]), static_cast<int>(dims[1]));
  std::memcpy(phi.samples().data(), bytes.data() + 8, n * sizeof(double));
  return phi;
}

}  // namespace levelseg
