#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "depthprobe/error.hpp"
#include "depthprobe/geometry.hpp"
#include "oracles.hpp"

using namespace depthprobe;

TEST(ApparentSize, DirectSubstitution) {
  const CameraModel cam;
  EXPECT_DOUBLE_EQ(depth_from_apparent_size(cam, 70.0, 1.5), 15.0);
  EXPECT_DOUBLE_EQ(depth_from_apparent_size(cam, 700.0, 1.0), 1.0);
}

TEST(ApparentSize, DoublingSizeHalvesDepth) {
  const CameraModel cam;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> h(1.0, 500.0), H(0.1, 5.0);
  for (int i = 0; i < 1000; ++i) {
    const double a = h(rng), b = H(rng);
    EXPECT_NEAR(depth_from_apparent_size(cam, 2 * a, b), depth_from_apparent_size(cam, a, b) / 2, 1e-12);
  }
}

TEST(ApparentSize, RejectsNonPositiveInputs) {
  const CameraModel cam;
  EXPECT_THROW(depth_from_apparent_size(cam, 0.0, 1.0), DomainError);
  EXPECT_THROW(depth_from_apparent_size(cam, 10.0, -1.0), DomainError);
}

TEST(VerticalPosition, DirectSubstitution) {
  const CameraModel cam;
  EXPECT_NEAR(depth_from_vertical_position(cam, 100.0, 0.0), 11.55, 1e-12);
  EXPECT_NEAR(depth_from_vertical_position(cam, 690.0, -10.0), 1.65, 1e-12);
}

TEST(VerticalPosition, StrictlyDecreasingBelowHorizon) {
  const CameraModel cam;
  double prev = std::numeric_limits<double>::infinity();
  for (double dy = 0.5; dy < 400; dy += 0.5) {
    const double z = depth_from_vertical_position(cam, -5.0 + dy, -5.0);
    EXPECT_LT(z, prev);
    prev = z;
  }
}

TEST(VerticalPosition, AboveHorizonIsTyped) {
  const CameraModel cam;
  EXPECT_THROW(depth_from_vertical_position(cam, 0.0, 0.0), AboveHorizonError);
  EXPECT_THROW(depth_from_vertical_position(cam, -3.0, 0.0), AboveHorizonError);
}

TEST(Placement, IdentityAtUnitDistance) {
  const Placement p = place_at_relative_distance({37.0, 81.0}, -4.0, 1.0);
  EXPECT_EQ(p.scale, 1.0);
  EXPECT_EQ(p.contact, (CenteredCoord{37.0, 81.0}));
}

TEST(Placement, WorkedExample) {
  const Placement p = place_at_relative_distance({100.0, 50.0}, 10.0, 2.0);
  EXPECT_DOUBLE_EQ(p.scale, 0.5);
  EXPECT_DOUBLE_EQ(p.contact.x, 50.0);
  EXPECT_DOUBLE_EQ(p.contact.y, 30.0);
}

TEST(Placement, RejectsNonPositiveDistance) {
  EXPECT_THROW(place_at_relative_distance({0.0, 10.0}, 0.0, 0.0), DomainError);
  EXPECT_THROW(place_at_relative_distance({0.0, 10.0}, 0.0, -1.0), DomainError);
}

TEST(Placement, MatchesReferenceAndRoundTripsDepth) {
  const CameraModel cam;
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> ux(-600, 600), uh(-40, 40), udy(0.5, 180), ur(0.2, 5.0);
  for (int i = 0; i < 20000; ++i) {
    const double h = uh(rng), x = ux(rng), y = h + udy(rng), r = ur(rng);
    const Placement p = place_at_relative_distance({x, y}, h, r);
    const oracle::Placed q = oracle::place(x, y, h, r);
    ASSERT_NEAR(p.scale, q.s, 1e-12);
    ASSERT_NEAR(p.contact.x, q.x, 1e-9);
    ASSERT_NEAR(p.contact.y, q.y, 1e-9);
    ASSERT_GT(p.contact.y, h);
    const double z0 = depth_from_vertical_position(cam, y, h);
    const double z1 = depth_from_vertical_position(cam, p.contact.y, h);
    ASSERT_NEAR(z1 / (r * z0), 1.0, 1e-9);
  }
}

TEST(Placement, CompositionMultipliesDistances) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> ux(-600, 600), uh(-40, 40), udy(0.5, 180), ur(0.2, 5.0);
  for (int i = 0; i < 20000; ++i) {
    const double h = uh(rng), a = ur(rng), b = ur(rng);
    const CenteredCoord c{ux(rng), h + udy(rng)};
    const Placement ab = place_at_relative_distance(place_at_relative_distance(c, h, a).contact, h, b);
    const Placement once = place_at_relative_distance(c, h, a * b);
    ASSERT_NEAR(ab.contact.x, once.contact.x, 1e-9);
    ASSERT_NEAR(ab.contact.y, once.contact.y, 1e-9);
  }
}

TEST(GroundProfile, ClosedFormValue) {
  GroundPlaneModel plane;
  plane.horizon_y = 0.0;
  const std::vector<double> rows{100.0};
  EXPECT_NEAR(ground_disparity_profile(plane, rows)[0], 0.54 * 100.0 / (1.65 * 1242.0), 1e-15);
  EXPECT_NEAR(ground_disparity_profile(plane, rows)[0], 0.026350, 5e-6);
}

TEST(GroundProfile, ZeroAtAndAboveHorizonAndCollinearBelow) {
  GroundPlaneModel plane;
  plane.horizon_y = -7.0;
  const std::vector<double> rows{-50.0, -7.0, 43.0, 93.0, 143.0};
  const auto d = ground_disparity_profile(plane, rows);
  EXPECT_EQ(d[0], 0.0);
  EXPECT_EQ(d[1], 0.0);
  EXPECT_NEAR(d[3] - d[2], d[4] - d[3], 1e-15);
}

TEST(GroundProfile, ConvertsBackToVerticalPositionDepth) {
  GroundPlaneModel plane;
  plane.horizon_y = 3.5;
  const CameraModel& cam = plane.camera;
  std::vector<double> rows;
  for (double y = 4.0; y < 187; y += 1.0) rows.push_back(y);
  const auto d = ground_disparity_profile(plane, rows);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double z = cam.f_px * cam.baseline_m / (d[i] * cam.image_w_px);
    EXPECT_NEAR(z, depth_from_vertical_position(cam, rows[i], plane.horizon_y), 1e-9 * z);
    EXPECT_NEAR(depth_from_disparity(cam, d[i]), z, 1e-9 * z);
  }
}

TEST(GroundPlane, RollTiltsTheHorizonLine) {
  GroundPlaneModel plane;
  plane.roll_deg = 2.0;
  const double t = std::tan(2.0 * M_PI / 180.0);
  // Along the tilted horizon line the disparity vanishes.
  for (double x = -300; x <= 300; x += 50) {
    EXPECT_NEAR(plane.disparity_at({x, x * t - 1e-9}), 0.0, 1e-12);
    EXPECT_GT(plane.disparity_at({x, x * t + 20.0}), 0.0);
  }
}

TEST(DisparityDepth, InverseFunctions) {
  const CameraModel cam;
  for (double z = 1.0; z < 100; z *= 1.7) EXPECT_NEAR(depth_from_disparity(cam, disparity_from_depth(cam, z)), z, 1e-12 * z);
}

TEST(Coordinates, BijectionOnIntegerGrid) {
  const CameraModel cam;
  for (int r = 0; r < cam.image_h_px; r += 7) {
    for (int c = 0; c < cam.image_w_px; c += 13) {
      const PixelCoord p{static_cast<double>(c), static_cast<double>(r)};
      const CenteredCoord k = to_centered(p, cam.principal());
      EXPECT_EQ(to_pixel(k, cam.principal()), p);
    }
  }
  const PixelCoord center = image_center(1242, 375);
  EXPECT_EQ(center.col, 620.5);
  EXPECT_EQ(center.row, 187.0);
}

TEST(Camera, ValidateRejectsBrokenModels) {
  CameraModel cam;
  EXPECT_NO_THROW(cam.validate());
  cam.f_px = 0;
  EXPECT_THROW(cam.validate(), DomainError);
  cam = CameraModel{};
  cam.cx_px = 1242;
  EXPECT_THROW(cam.validate(), DomainError);
  cam = CameraModel{};
  cam.baseline_m = -0.1;
  EXPECT_THROW(cam.validate(), DomainError);
}

TEST(Camera, WithFrameRecentersPrincipalPoint) {
  const CameraModel cam = CameraModel{}.with_frame(100, 51);
  EXPECT_EQ(cam.image_w_px, 100);
  EXPECT_EQ(cam.cx_px, 49.5);
  EXPECT_EQ(cam.cy_px, 25.0);
  EXPECT_EQ(cam.f_px, 700.0);
}
