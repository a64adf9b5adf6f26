#include "depthprobe/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "depthprobe/random.hpp"

namespace depthprobe {

namespace {

constexpr std::uint8_t kSky = 0, kRoad = 1, kVehicle = 2;

std::uint8_t clamp8(double v) { return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L)); }

Rgb random_body_color(Rng& rng) {
  static constexpr Rgb kColors[] = {{180, 30, 35}, {30, 60, 150}, {220, 220, 215}, {40, 40, 45},
                                    {200, 160, 40}, {70, 120, 70}, {150, 150, 160}};
  return kColors[uniform_index(rng, std::size(kColors))];
}

Rgb shade(Rgb c, double f) { return {clamp8(c.r * f), clamp8(c.g * f), clamp8(c.b * f)}; }

ImageBuffer render_background(Rng& rng, int w, int h, double horizon) {
  ImageBuffer img(w, h);
  const PixelCoord center = image_center(w, h);
  for (int r = 0; r < h; ++r) {
    const double y = r - center.row;
    for (int c = 0; c < w; ++c) {
      const double x = c - center.col;
      if (y < horizon) {
        const double t = (y + center.row) / std::max(1.0, horizon + center.row);
        img.at(c, r) = {clamp8(110 + 60 * t), clamp8(150 + 40 * t), clamp8(210 + 20 * t)};
        continue;
      }
      const double below = y - horizon;
      double g = 95 + 0.12 * below + 14.0 * (uniform01(rng) - 0.5);
      // Dashed center line, widening toward the camera.
      if (std::abs(x) < 1.0 + 0.03 * below && std::fmod(std::log1p(below) * 6.0, 2.0) < 1.0) g = 225;
      img.at(c, r) = {clamp8(g), clamp8(g), clamp8(g + 4)};
    }
  }
  return img;
}

ObjectCutout make_cutout(Rng& rng, const SceneImage& source, double horizon, const std::string& slot2) {
  const int sw = 60 + static_cast<int>(uniform_index(rng, 31));
  const int sh = 36 + static_cast<int>(uniform_index(rng, 15));
  const Rgb body = random_body_color(rng);
  const Rgb glass{120, 150, 175};
  const int cabin_top = sh * 35 / 100;

  ObjectCutout c;
  c.sprite = SpriteImage(sw, sh);
  c.measure_mask = Mask(sw, sh, 0);
  for (int r = 0; r < sh; ++r) {
    for (int col = 0; col < sw; ++col) {
      Rgba px{0, 0, 0, 0};
      if (r < cabin_top) {
        if (col >= sw / 5 && col < sw - sw / 5) {
          const bool window = r > 2 && col > sw / 5 + 3 && col < sw - sw / 5 - 3;
          const Rgb v = window ? glass : body;
          px = {v.r, v.g, v.b, 255};
        }
      } else {
        const bool wheel = r >= sh - 7 && ((col > 4 && col < 16) || (col > sw - 17 && col < sw - 5));
        const Rgb v = wheel ? Rgb{25, 25, 25} : (r >= sh - 10 ? shade(body, 0.7) : body);
        px = {v.r, v.g, v.b, 255};
      }
      c.sprite.at(col, r) = px;
      if (r >= cabin_top + 2 && r < sh * 8 / 10 && col >= sw * 15 / 100 && col < sw * 85 / 100) {
        c.measure_mask.at(col, r) = 1;
      }
    }
  }

  const PixelCoord center = image_center(source.image.width(), source.image.height());
  const double max_y = std::floor(center.row) - 1.0;
  double cy = std::round(horizon + uniform(rng, 120.0, 180.0));
  cy = std::clamp(cy, std::ceil(horizon + 120.0), max_y);
  const double pc = std::round(center.col + uniform(rng, -100.0, 100.0));
  const double cu = sw / 2;
  c.ground_contact = {pc - center.col, cy};
  c.sprite_origin = {c.ground_contact.x - cu, c.ground_contact.y - (sh - 1)};
  c.source_id = source.id;
  c.class_label = "car";
  c.placement_slots = {source.id};
  if (slot2 != source.id) c.placement_slots.push_back(slot2);
  return c;
}

}  // namespace

Dataset make_synthetic_dataset(const SyntheticParams& params) {
  if (params.n_scenes < 1) throw ConfigError("synthetic dataset needs at least one scene");
  if (!(params.horizon_min <= params.horizon_max)) throw ConfigError("horizon range is empty");
  params.camera.validate();
  Rng rng(params.seed);
  const int w = params.camera.image_w_px, h = params.camera.image_h_px;

  Dataset ds;
  ds.camera = params.camera;
  for (int i = 0; i < params.n_scenes; ++i) {
    char id[32];
    std::snprintf(id, sizeof id, "scene_%03d", i);
    SceneImage im;
    im.id = id;
    const double horizon = uniform(rng, params.horizon_min, params.horizon_max);
    im.image = render_background(rng, w, h, horizon);
    im.true_horizon_y = horizon;

    SemanticMap sem;
    sem.palette = {{kSky, {70, 130, 180}}, {kRoad, {128, 64, 128}}, {kVehicle, {0, 0, 142}}};
    sem.names = {{kSky, "sky"}, {kRoad, "road"}, {kVehicle, "vehicle"}};
    sem.labels = LabelMap(w, h, kRoad);
    const PixelCoord center = image_center(w, h);
    for (int r = 0; r < h; ++r) {
      if (r - center.row < horizon) std::fill(sem.labels.row(r).begin(), sem.labels.row(r).end(), kSky);
    }

    OracleSpec scene;
    scene.plane = {horizon, params.camera, 0.0};
    for (int k = 0; k < params.obstacles_per_scene; ++k) {
      const double side = k % 2 == 0 ? -1.0 : 1.0;
      const double xc = side * uniform(rng, 230.0, 520.0);
      const double bw = uniform(rng, 40.0, 110.0);
      const double bh = uniform(rng, 20.0, 55.0);
      const double bottom = horizon + uniform(rng, 30.0, 80.0);
      OracleObstacle ob;
      ob.footprint = {{xc - bw / 2, bottom - bh}, {xc + bw / 2, bottom - bh}, {xc + bw / 2, bottom}, {xc - bw / 2, bottom}};
      ob.depth_m = depth_from_vertical_position(params.camera, bottom, horizon);
      const Mask mask = polygon_mask(ob.footprint, w, h);
      const Rgb body = random_body_color(rng);
      for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
          if (!mask.at(c, r)) continue;
          const bool lower = r - center.row > bottom - bh / 4;
          im.image.at(c, r) = lower ? shade(body, 0.6) : body;
          sem.labels.at(c, r) = kVehicle;
        }
      }
      char ob_id[32];
      std::snprintf(ob_id, sizeof ob_id, "obstacle_%02d", k);
      im.obstacles.push_back({ob_id, mask});
      scene.obstacles.push_back(std::move(ob));
    }
    scene.prior_plane = scene.plane;
    im.semantic = std::move(sem);

    OracleSpec noisy = scene;
    noisy.noise_sd = params.gt_noise_sd;
    im.gt = render_oracle(noisy, w, h, params.seed * 7919 + static_cast<std::uint64_t>(i));
    im.scene = std::move(scene);
    ds.images.push_back(std::move(im));
  }

  const int n_cut = std::min(params.n_cutouts, params.n_scenes);
  for (int k = 0; k < n_cut; ++k) {
    const int s = k * params.n_scenes / std::max(1, n_cut);
    const auto& src = ds.images[s];
    const auto& slot2 = ds.images[(s + 1) % params.n_scenes].id;
    ds.cutouts.push_back(make_cutout(rng, src, src.scene->plane.horizon_y, slot2));
    ds.cutouts.back().validate();
  }
  return ds;
}

}  // namespace depthprobe
