#pragma once

#include <optional>

#include "depthprobe/raster.hpp"

namespace depthprobe {

/// Per-pixel disparity normalized by the camera's nominal image width.
struct DisparityMap {
  Raster<double> values;
  /// Optional validity mask; absent means every finite pixel is valid.
  std::optional<Mask> valid;

  DisparityMap() = default;
  DisparityMap(int width, int height, double fill = 0.0) : values(width, height, fill) {}
  explicit DisparityMap(Raster<double> v) : values(std::move(v)) {}

  int width() const noexcept { return values.width(); }
  int height() const noexcept { return values.height(); }
  double at(int col, int row) const { return values.at(col, row); }
  double& at(int col, int row) { return values.at(col, row); }

  bool is_valid(int col, int row) const;

  /// Throws DomainError unless every valid value is finite and in [0, 1).
  void validate() const;

  friend bool operator==(const DisparityMap&, const DisparityMap&) = default;
};

}  // namespace depthprobe
