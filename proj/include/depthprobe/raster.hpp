#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "depthprobe/error.hpp"
#include "depthprobe/geometry.hpp"

namespace depthprobe {

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  friend bool operator==(const Rgb&, const Rgb&) = default;
};

struct Rgba {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;
  std::uint8_t a = 0;

  friend bool operator==(const Rgba&, const Rgba&) = default;
};

/// Dense row-major 2-D grid with value semantics.
template <class T>
class Raster {
 public:
  using value_type = T;

  Raster() = default;
  Raster(int width, int height, T fill = T{}) : width_(width), height_(height) {
    if (width <= 0 || height <= 0) throw DomainError("raster dimensions must be positive");
    data_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
  }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  bool empty() const noexcept { return data_.empty(); }
  std::size_t size() const noexcept { return data_.size(); }

  bool contains(int col, int row) const noexcept {
    return col >= 0 && row >= 0 && col < width_ && row < height_;
  }

  T& at(int col, int row) { return data_[index(col, row)]; }
  const T& at(int col, int row) const { return data_[index(col, row)]; }

  std::span<T> pixels() noexcept { return data_; }
  std::span<const T> pixels() const noexcept { return data_; }

  std::span<T> row(int r) { return {data_.data() + index(0, r), static_cast<std::size_t>(width_)}; }
  std::span<const T> row(int r) const {
    return {data_.data() + index(0, r), static_cast<std::size_t>(width_)};
  }

  friend bool operator==(const Raster&, const Raster&) = default;

 private:
  std::size_t index(int col, int row) const noexcept {
    return static_cast<std::size_t>(row) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(col);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<T> data_;
};

/// 8-bit RGB image.
using ImageBuffer = Raster<Rgb>;
using SpriteImage = Raster<Rgba>;
/// Boolean raster; any nonzero value is "set".
using Mask = Raster<std::uint8_t>;
using LabelMap = Raster<std::uint8_t>;

/// Pixel rectangle, half-open: [col, col + width) x [row, row + height).
struct Rect {
  int col = 0;
  int row = 0;
  int width = 0;
  int height = 0;

  int right() const noexcept { return col + width; }
  int bottom() const noexcept { return row + height; }
  bool contains(int c, int r) const noexcept {
    return c >= col && r >= row && c < right() && r < bottom();
  }
  bool inside(int frame_w, int frame_h) const noexcept {
    return width > 0 && height > 0 && col >= 0 && row >= 0 && right() <= frame_w &&
           bottom() <= frame_h;
  }

  friend bool operator==(const Rect&, const Rect&) = default;
};

/// Rectangle expressed as fractions of the frame.
struct FracRect {
  double x0 = 0.0;
  double y0 = 0.0;
  double x1 = 1.0;
  double y1 = 1.0;

  Rect resolve(int width, int height) const;
};

template <class T>
Raster<T> crop(const Raster<T>& src, const Rect& window) {
  if (!window.inside(src.width(), src.height())) throw CropError("crop window exceeds raster");
  Raster<T> out(window.width, window.height);
  for (int r = 0; r < window.height; ++r) {
    for (int c = 0; c < window.width; ++c) out.at(c, r) = src.at(window.col + c, window.row + r);
  }
  return out;
}

/// Signed shoelace area; sign depends on winding.
double polygon_area(std::span<const CenteredCoord> polygon);

/// True if no two non-adjacent edges intersect.
bool polygon_is_simple(std::span<const CenteredCoord> polygon);

/// Pixels whose centers fall inside `polygon` (even-odd rule). Vertices are
/// centered on the raster's geometric center.
Mask polygon_mask(std::span<const CenteredCoord> polygon, int width, int height);

std::size_t mask_count(const Mask& mask);
std::optional<Rect> mask_bounds(const Mask& mask);
/// Mean pixel position of the set pixels; throws DomainError on an empty mask.
PixelCoord mask_centroid(const Mask& mask);

}  // namespace depthprobe
