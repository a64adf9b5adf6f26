#include <gtest/gtest.h>

#include "depthprobe/raster.hpp"

using namespace depthprobe;

TEST(Raster, RejectsEmptyDimensions) {
  EXPECT_THROW(Mask(0, 3), DomainError);
  EXPECT_THROW(Mask(3, -1), DomainError);
}

TEST(Raster, CropCopiesWindowAndRejectsOverflow) {
  Raster<int> r(5, 4);
  for (int y = 0; y < 4; ++y)
    for (int x = 0; x < 5; ++x) r.at(x, y) = 10 * y + x;
  const auto c = crop(r, Rect{1, 2, 3, 2});
  EXPECT_EQ(c.width(), 3);
  EXPECT_EQ(c.at(0, 0), 21);
  EXPECT_EQ(c.at(2, 1), 33);
  EXPECT_THROW(crop(r, Rect{3, 0, 3, 1}), CropError);
}

TEST(FracRect, ResolvesToPixels) {
  const Rect r = FracRect{0.25, 0.6, 0.75, 1.0}.resolve(1242, 375);
  EXPECT_EQ(r.row, 225);
  EXPECT_EQ(r.bottom(), 375);
  EXPECT_GT(r.width, 0);
  EXPECT_TRUE(r.inside(1242, 375));
}

TEST(Polygon, AreaAndSimplicity) {
  const std::vector<CenteredCoord> sq{{0, 0}, {4, 0}, {4, 3}, {0, 3}};
  EXPECT_DOUBLE_EQ(std::abs(polygon_area(sq)), 12.0);
  EXPECT_TRUE(polygon_is_simple(sq));
  const std::vector<CenteredCoord> bow{{0, 0}, {4, 3}, {4, 0}, {0, 3}};
  EXPECT_FALSE(polygon_is_simple(bow));
}

TEST(Polygon, MaskCoversPixelCentersInside) {
  // 9x9 raster, center (4, 4). Square from -2.5 to 2.5 covers 5x5 pixels.
  const std::vector<CenteredCoord> sq{{-2.5, -2.5}, {2.5, -2.5}, {2.5, 2.5}, {-2.5, 2.5}};
  const Mask m = polygon_mask(sq, 9, 9);
  EXPECT_EQ(mask_count(m), 25u);
  EXPECT_EQ(mask_bounds(m), (Rect{2, 2, 5, 5}));
  const PixelCoord c = mask_centroid(m);
  EXPECT_DOUBLE_EQ(c.col, 4.0);
  EXPECT_DOUBLE_EQ(c.row, 4.0);
}

TEST(Mask, EmptyMaskHasNoBoundsOrCentroid) {
  const Mask m(4, 4, 0);
  EXPECT_FALSE(mask_bounds(m).has_value());
  EXPECT_THROW(mask_centroid(m), DomainError);
}
