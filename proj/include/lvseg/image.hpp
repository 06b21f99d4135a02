#ifndef LVSEG_IMAGE_HPP
#define LVSEG_IMAGE_HPP

#include <array>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace lvseg {

/// Grayscale raster, row-major float pixels.
struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<float> pixels;

  GrayImage() = default;
  GrayImage(int w, int h, float fill = 0.f)
      : width(w), height(h), pixels(static_cast<size_t>(w) * h, fill) {
    if (w <= 0 || h <= 0) throw std::invalid_argument("GrayImage: non-positive size");
  }

  float& at(int x, int y) { return pixels[static_cast<size_t>(y) * width + x]; }
  float at(int x, int y) const { return pixels[static_cast<size_t>(y) * width + x]; }
  bool in_bounds(int x, int y) const {
    return x >= 0 && x < width && y >= 0 && y < height;
  }
};

/// 2-D boolean raster, row-major.
struct BinaryMask {
  int width = 0;
  int height = 0;
  std::vector<uint8_t> bits;

  BinaryMask() = default;
  BinaryMask(int w, int h, bool fill = false)
      : width(w), height(h), bits(static_cast<size_t>(w) * h, fill ? 1 : 0) {
    if (w <= 0 || h <= 0) throw std::invalid_argument("BinaryMask: non-positive size");
  }

  bool get(int x, int y) const { return bits[static_cast<size_t>(y) * width + x] != 0; }
  void set(int x, int y, bool v) { bits[static_cast<size_t>(y) * width + x] = v ? 1 : 0; }
  bool in_bounds(int x, int y) const {
    return x >= 0 && x < width && y >= 0 && y < height;
  }

  long long area() const {
    long long n = 0;
    for (uint8_t b : bits) n += b;
    return n;
  }
  bool empty() const { return area() == 0; }
  bool same_size(const BinaryMask& o) const {
    return width == o.width && height == o.height;
  }

  bool operator==(const BinaryMask& o) const {
    return width == o.width && height == o.height && bits == o.bits;
  }
};

/// 3x3 kernel with anchored center; center element is always set.
struct StructuringElement {
  std::array<uint8_t, 9> k{};  // row-major, anchor at (1,1)

  bool get(int dx, int dy) const { return k[static_cast<size_t>((dy + 1) * 3 + dx + 1)] != 0; }

  /// The 4-connected cross {(0,1,0;1,1,1;0,1,0)}.
  static StructuringElement cross() {
    StructuringElement se;
    se.k = {0, 1, 0, 1, 1, 1, 0, 1, 0};
    return se;
  }
  static StructuringElement box() {
    StructuringElement se;
    se.k = {1, 1, 1, 1, 1, 1, 1, 1, 1};
    return se;
  }
};

}  // namespace lvseg

#endif
