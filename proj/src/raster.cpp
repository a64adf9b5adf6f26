#include "depthprobe/raster.hpp"

#include <algorithm>
#include <cmath>

namespace depthprobe {

Rect FracRect::resolve(int width, int height) const {
  if (!(x0 >= 0.0 && y0 >= 0.0 && x1 <= 1.0 && y1 <= 1.0 && x0 < x1 && y0 < y1)) {
    throw DomainError("fractional rectangle must satisfy 0 <= x0 < x1 <= 1, 0 <= y0 < y1 <= 1");
  }
  Rect r;
  r.col = static_cast<int>(std::lround(x0 * width));
  r.row = static_cast<int>(std::lround(y0 * height));
  r.width = static_cast<int>(std::lround(x1 * width)) - r.col;
  r.height = static_cast<int>(std::lround(y1 * height)) - r.row;
  if (r.width <= 0 || r.height <= 0) throw DomainError("fractional rectangle resolves to no pixels");
  return r;
}

double polygon_area(std::span<const CenteredCoord> polygon) {
  const std::size_t n = polygon.size();
  if (n < 3) return 0.0;
  double twice = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& a = polygon[i];
    const auto& b = polygon[(i + 1) % n];
    twice += a.x * b.y - b.x * a.y;
  }
  return 0.5 * twice;
}

namespace {

double cross(CenteredCoord o, CenteredCoord a, CenteredCoord b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

bool on_segment(CenteredCoord p, CenteredCoord a, CenteredCoord b) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
         p.y <= std::max(a.y, b.y);
}

bool segments_intersect(CenteredCoord p1, CenteredCoord p2, CenteredCoord q1, CenteredCoord q2) {
  const double d1 = cross(q1, q2, p1);
  const double d2 = cross(q1, q2, p2);
  const double d3 = cross(p1, p2, q1);
  const double d4 = cross(p1, p2, q2);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) {
    return true;
  }
  if (d1 == 0 && on_segment(p1, q1, q2)) return true;
  if (d2 == 0 && on_segment(p2, q1, q2)) return true;
  if (d3 == 0 && on_segment(q1, p1, p2)) return true;
  if (d4 == 0 && on_segment(q2, p1, p2)) return true;
  return false;
}

}  // namespace

bool polygon_is_simple(std::span<const CenteredCoord> polygon) {
  const std::size_t n = polygon.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      // Adjacent edges share a vertex by construction.
      if (j == i + 1 || (i == 0 && j == n - 1)) continue;
      if (segments_intersect(polygon[i], polygon[(i + 1) % n], polygon[j], polygon[(j + 1) % n])) {
        return false;
      }
    }
  }
  return true;
}

Mask polygon_mask(std::span<const CenteredCoord> polygon, int width, int height) {
  Mask out(width, height, 0);
  const std::size_t n = polygon.size();
  if (n < 3) return out;
  const PixelCoord center = image_center(width, height);
  std::vector<double> xs;
  for (int r = 0; r < height; ++r) {
    const double y = r - center.row;
    xs.clear();
    for (std::size_t i = 0; i < n; ++i) {
      const auto& a = polygon[i];
      const auto& b = polygon[(i + 1) % n];
      // Half-open in y so shared vertices count once.
      if ((a.y <= y && y < b.y) || (b.y <= y && y < a.y)) {
        xs.push_back(a.x + (y - a.y) * (b.x - a.x) / (b.y - a.y));
      }
    }
    std::sort(xs.begin(), xs.end());
    for (std::size_t k = 0; k + 1 < xs.size(); k += 2) {
      const int c0 = std::max(0, static_cast<int>(std::ceil(xs[k] + center.col)));
      const int c1 = std::min(width - 1, static_cast<int>(std::ceil(xs[k + 1] + center.col)) - 1);
      for (int c = c0; c <= c1; ++c) out.at(c, r) = 1;
    }
  }
  return out;
}

std::size_t mask_count(const Mask& mask) {
  return static_cast<std::size_t>(
      std::count_if(mask.pixels().begin(), mask.pixels().end(), [](auto v) { return v != 0; }));
}

std::optional<Rect> mask_bounds(const Mask& mask) {
  int c0 = mask.width(), r0 = mask.height(), c1 = -1, r1 = -1;
  for (int r = 0; r < mask.height(); ++r) {
    for (int c = 0; c < mask.width(); ++c) {
      if (!mask.at(c, r)) continue;
      c0 = std::min(c0, c);
      c1 = std::max(c1, c);
      r0 = std::min(r0, r);
      r1 = std::max(r1, r);
    }
  }
  if (c1 < 0) return std::nullopt;
  return Rect{c0, r0, c1 - c0 + 1, r1 - r0 + 1};
}

PixelCoord mask_centroid(const Mask& mask) {
  double sc = 0.0, sr = 0.0;
  std::size_t n = 0;
  for (int r = 0; r < mask.height(); ++r) {
    for (int c = 0; c < mask.width(); ++c) {
      if (!mask.at(c, r)) continue;
      sc += c;
      sr += r;
      ++n;
    }
  }
  if (n == 0) throw DomainError("centroid of an empty mask");
  return {sc / static_cast<double>(n), sr / static_cast<double>(n)};
}

}  // namespace depthprobe
