#include "depthprobe/disparity.hpp"

#include <cmath>
#include <string>

namespace depthprobe {

bool DisparityMap::is_valid(int col, int row) const {
  if (valid && !valid->at(col, row)) return false;
  return std::isfinite(values.at(col, row));
}

void DisparityMap::validate() const {
  if (valid && (valid->width() != width() || valid->height() != height())) {
    throw DomainError("validity mask does not match disparity map");
  }
  for (int r = 0; r < height(); ++r) {
    for (int c = 0; c < width(); ++c) {
      if (valid && !valid->at(c, r)) continue;
      const double d = values.at(c, r);
      if (!std::isfinite(d) || d < 0.0 || d >= 1.0) {
        throw DomainError("disparity out of range at (" + std::to_string(c) + ", " +
                          std::to_string(r) + ")");
      }
    }
  }
}

}  // namespace depthprobe
