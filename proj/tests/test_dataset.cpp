#include <gtest/gtest.h>

#include <fstream>

#include "depthprobe/dataset.hpp"
#include "depthprobe/png_io.hpp"
#include "depthprobe/robustfit.hpp"
#include "depthprobe/serialization.hpp"
#include "depthprobe/synthetic.hpp"
#include "depthprobe/wire.hpp"
#include "oracles.hpp"

using namespace depthprobe;
namespace fs = std::filesystem;

namespace {

Dataset small(std::uint64_t seed = 5) {
  SyntheticParams p;
  p.n_scenes = 3;
  p.seed = seed;
  return make_synthetic_dataset(p);
}

}  // namespace

TEST(Synthetic, DeterministicPerSeed) {
  const Dataset a = small(5), b = small(5), c = small(6);
  ASSERT_EQ(a.images.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(a.images[i].image, b.images[i].image);
    EXPECT_EQ(*a.images[i].gt, *b.images[i].gt);
  }
  EXPECT_NE(a.images[0].image, c.images[0].image);
}

TEST(Synthetic, ScenesAreConsistent) {
  SyntheticParams p;
  p.n_scenes = 6;
  p.seed = 11;
  const Dataset d = make_synthetic_dataset(p);
  EXPECT_EQ(d.cutouts.size(), static_cast<std::size_t>(p.n_cutouts));
  for (const auto& im : d.images) {
    ASSERT_TRUE(im.scene && im.true_horizon_y && im.gt && im.semantic);
    EXPECT_EQ(im.image.width(), 1242);
    EXPECT_EQ(im.image.height(), 375);
    EXPECT_GE(*im.true_horizon_y, p.horizon_min);
    EXPECT_LE(*im.true_horizon_y, p.horizon_max);
    EXPECT_DOUBLE_EQ(im.scene->plane.horizon_y, *im.true_horizon_y);
    EXPECT_EQ(im.obstacles.size(), im.scene->obstacles.size());
    // The noisy ground truth still gives back the true horizon.
    EXPECT_NEAR(estimate_horizon(*im.gt).horizon_y, *im.true_horizon_y, 1.0) << im.id;
  }
}

TEST(Dataset, SaveLoadRoundTrip) {
  oracle::TempDir tmp;
  const Dataset d = small();
  save_dataset(d, tmp.path());
  const Dataset back = load_dataset(DatasetLayout::under(tmp.path()));
  ASSERT_EQ(back.images.size(), d.images.size());
  ASSERT_EQ(back.cutouts.size(), d.cutouts.size());
  EXPECT_EQ(back.camera.f_px, d.camera.f_px);
  for (std::size_t i = 0; i < d.images.size(); ++i) {
    const SceneImage& a = d.images[i];
    const SceneImage* b = back.find(a.id);
    ASSERT_NE(b, nullptr);
    EXPECT_EQ(b->image, a.image);
    EXPECT_EQ(Json(*b->scene), Json(*a.scene));
    EXPECT_DOUBLE_EQ(*b->true_horizon_y, *a.true_horizon_y);
    EXPECT_EQ(b->semantic->labels, a.semantic->labels);
    ASSERT_EQ(b->obstacles.size(), a.obstacles.size());
    for (std::size_t k = 0; k < a.obstacles.size(); ++k) EXPECT_EQ(b->obstacles[k].mask, a.obstacles[k].mask);
    const double step = wire::encode(*a.gt).d_max / 65535.0;
    for (int r = 0; r < 375; r += 17)
      for (int c = 0; c < 1242; c += 31) ASSERT_NEAR(b->gt->at(c, r), a.gt->at(c, r), step);
  }
  for (std::size_t k = 0; k < d.cutouts.size(); ++k) {
    EXPECT_EQ(back.cutouts[k].sprite, d.cutouts[k].sprite);
    EXPECT_EQ(back.cutouts[k].ground_contact.y, d.cutouts[k].ground_contact.y);
  }
}

TEST(Dataset, LoadRejectsBrokenLayouts) {
  oracle::TempDir tmp;
  EXPECT_THROW(load_dataset(DatasetLayout::under(tmp.path())), Error);
  const Dataset d = small();
  save_dataset(d, tmp.path());
  const fs::path mask_dir = tmp.path() / "obstacles" / d.images[0].id;
  ASSERT_TRUE(fs::exists(mask_dir));
  const fs::path bad = *fs::directory_iterator(mask_dir);
  write_png_mask(bad, Mask(10, 10, 1));
  EXPECT_THROW(load_dataset(DatasetLayout::under(tmp.path())), Error);
}

TEST(Dataset, FromEnvNeedsVariable) {
  ::unsetenv("DEPTHPROBE_DATASET");
  EXPECT_THROW(DatasetLayout::from_env(), ConfigError);
  ::setenv("DEPTHPROBE_DATASET", "/data/x", 1);
  EXPECT_EQ(DatasetLayout::from_env().root, fs::path("/data/x"));
  ::unsetenv("DEPTHPROBE_DATASET");
}

TEST(GroundTruth, PixelConventionIsTimes256) {
  oracle::TempDir tmp;
  const CameraModel cam;
  Gray16Image g(4, 2, 0);
  g.at(0, 0) = 256 * 40;   // 40 px
  g.at(1, 0) = 256 * 3 + 128;  // 3.5 px
  write_png_gray16(tmp.path() / "g.png", g);
  const DisparityMap m = read_gt_disparity(tmp.path() / "g.png", tmp.path() / "g.json", cam);
  EXPECT_DOUBLE_EQ(m.at(0, 0), 40.0 / cam.image_w_px);
  EXPECT_DOUBLE_EQ(m.at(1, 0), 3.5 / cam.image_w_px);
  EXPECT_TRUE(m.is_valid(0, 0));
  EXPECT_FALSE(m.is_valid(2, 1));
}

TEST(GroundTruth, WireSidecarIsHonoured) {
  oracle::TempDir tmp;
  DisparityMap m(5, 3, 0.01);
  m.at(4, 2) = 0.04;
  wire::write_response(tmp.path(), "x", m);
  const DisparityMap back =
      read_gt_disparity(wire::response_png(tmp.path(), "x"), wire::response_sidecar(tmp.path(), "x"), CameraModel{});
  EXPECT_NEAR(back.at(4, 2), 0.04, 1e-15);
  EXPECT_NEAR(back.at(0, 0), 0.01, 0.04 / 65535.0);
}

TEST(Serialization, SceneAndParamsRoundTrip) {
  OracleSpec s;
  s.plane.horizon_y = -7.25;
  s.plane.roll_deg = 1.5;
  s.obstacles.push_back({{{-3, 4}, {5, 4}, {5, 9}}, 12.5});
  s.noise_sd = 0.003;
  s.mode = OracleMode::FixedPrior;
  const OracleSpec back = Json(s).get<OracleSpec>();
  EXPECT_EQ(Json(back), Json(s));
  EXPECT_EQ(back.obstacles[0].footprint[2].y, 9.0);

  RansacParams r;
  r.seed = 42;
  r.iterations = 77;
  EXPECT_EQ(Json(Json(r).get<RansacParams>()), Json(r));
  HoughParams h;
  h.angle_res_deg = 0.05;
  EXPECT_EQ(Json(h).get<HoughParams>().angle_res_deg, 0.05);
  MetricSet m{0.1, 0.2, 0.3, 0.4, 5, 0.6, 0.7, 0.8};
  EXPECT_EQ(Json(m).get<MetricSet>(), m);
  EXPECT_EQ(Json(CenteredCoord{1.5, -2}), Json::parse("[1.5, -2.0]"));
}
