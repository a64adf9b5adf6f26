#include "depthprobe/dataset.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>

#include "depthprobe/png_io.hpp"
#include "depthprobe/serialization.hpp"
#include "depthprobe/wire.hpp"

namespace depthprobe {

namespace fs = std::filesystem;

namespace {

Json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path.string(), "cannot open");
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw IoError(path.string(), std::string("invalid JSON: ") + e.what());
  }
}

void write_json(const fs::path& path, const Json& j) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError(path.string(), "cannot open for writing");
  out << j.dump(2) << '\n';
  if (!out) throw IoError(path.string(), "write failed");
}

std::vector<fs::path> sorted_files(const fs::path& dir, const std::string& ext) {
  std::vector<fs::path> out;
  if (!fs::is_directory(dir)) return out;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ext) out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

ObjectCutout read_cutout(const fs::path& sidecar) {
  const Json j = read_json(sidecar);
  const fs::path dir = sidecar.parent_path();
  ObjectCutout c;
  try {
    const fs::path sprite = dir / j.at("sprite").get<std::string>();
    if (!fs::exists(sprite)) throw ConfigError(sidecar.string() + ": sprite '" + sprite.string() + "' does not exist");
    c.sprite = read_png_rgba(sprite);
    c.sprite_origin = j.at("sprite_origin").get<CenteredCoord>();
    c.ground_contact = j.at("ground_contact").get<CenteredCoord>();
    c.source_id = j.value("source_id", sidecar.stem().string());
    c.class_label = j.value("class_label", std::string{});
    c.placement_slots = j.value("placement_slots", std::vector<std::string>{});
    if (const auto it = j.find("measure_mask"); it != j.end()) {
      const fs::path mask = dir / it->get<std::string>();
      if (!fs::exists(mask)) throw ConfigError(sidecar.string() + ": mask '" + mask.string() + "' does not exist");
      c.measure_mask = read_png_mask(mask);
    } else {
      c.measure_mask = c.alpha_support();
    }
  } catch (const Json::exception& e) {
    throw ConfigError(sidecar.string() + ": " + e.what());
  }
  c.validate();
  return c;
}

}  // namespace

const SceneImage* Dataset::find(const std::string& id) const {
  for (const auto& im : images) {
    if (im.id == id) return &im;
  }
  return nullptr;
}

ClassColorTable Dataset::effective_class_colors() const {
  if (class_colors) return *class_colors;
  ClassColorAccumulator acc;
  for (const auto& im : images) {
    if (im.semantic) acc.add(im.image, im.semantic->labels);
  }
  return acc.table();
}

DatasetLayout DatasetLayout::under(const fs::path& root) {
  return {root,           root / "images",   root / "cutouts",  root / "scenes",
          root / "semantic", root / "gt", root / "obstacles"};
}

DatasetLayout DatasetLayout::from_env() {
  const char* env = std::getenv("DEPTHPROBE_DATASET");
  if (env == nullptr || *env == '\0') throw ConfigError("DEPTHPROBE_DATASET is not set");
  return under(env);
}

DisparityMap read_gt_disparity(const fs::path& png, const fs::path& sidecar, const CameraModel& camera) {
  std::optional<double> d_max;
  if (fs::exists(sidecar)) {
    const Json j = read_json(sidecar);
    if (j.contains("d_max")) d_max = j.at("d_max").get<double>();
  }
  if (d_max) return wire::decode({read_png_gray16(png), *d_max});
  const Gray16Image raw = read_png_gray16(png);
  DisparityMap map(raw.width(), raw.height());
  map.valid = Mask(raw.width(), raw.height(), 0);
  for (int r = 0; r < raw.height(); ++r) {
    for (int c = 0; c < raw.width(); ++c) {
      const std::uint16_t v = raw.at(c, r);
      if (v == 0) continue;
      map.at(c, r) = v / 256.0 / camera.image_w_px;
      map.valid->at(c, r) = 1;
    }
  }
  return map;
}

Dataset load_dataset(const DatasetLayout& layout) {
  Dataset ds;
  if (fs::exists(layout.root / "camera.json")) ds.camera = read_json(layout.root / "camera.json").get<CameraModel>();
  ds.camera.validate();
  if (fs::exists(layout.root / "class_colors.json")) {
    ClassColorTable table;
    for (const auto& [k, v] : read_json(layout.root / "class_colors.json").items()) {
      const auto rgb = v.get<std::vector<int>>();
      if (rgb.size() != 3) throw ConfigError("class_colors.json: color for label " + k + " needs three channels");
      table[static_cast<std::uint8_t>(std::stoi(k))] = {static_cast<std::uint8_t>(rgb[0]),
                                                        static_cast<std::uint8_t>(rgb[1]),
                                                        static_cast<std::uint8_t>(rgb[2])};
    }
    ds.class_colors = std::move(table);
  }

  const auto image_files = sorted_files(layout.images_dir, ".png");
  if (image_files.empty()) throw ConfigError("no images in " + layout.images_dir.string());
  for (const auto& file : image_files) {
    SceneImage im;
    im.id = file.stem().string();
    im.image = read_png_rgb(file);
    const int w = im.image.width(), h = im.image.height();

    if (const fs::path p = layout.scenes_dir / (im.id + ".json"); fs::exists(p)) {
      OracleSpec spec;
      spec.plane.camera = ds.camera;
      spec.prior_plane.camera = ds.camera;
      from_json(read_json(p), spec);
      im.scene = std::move(spec);
    }
    if (const fs::path p = layout.semantic_dir / (im.id + ".png"); fs::exists(p)) {
      im.semantic = read_png_semantic(p);
      if (im.semantic->labels.width() != w || im.semantic->labels.height() != h) {
        throw ConfigError(p.string() + ": semantic map does not match its image");
      }
    }
    const fs::path gt_json = layout.gt_dir / (im.id + ".json");
    if (fs::exists(gt_json)) {
      const Json j = read_json(gt_json);
      if (j.contains("horizon_y")) im.true_horizon_y = j.at("horizon_y").get<double>();
    }
    if (const fs::path p = layout.gt_dir / (im.id + ".png"); fs::exists(p)) {
      im.gt = read_gt_disparity(p, gt_json, ds.camera);
      if (im.gt->width() != w || im.gt->height() != h) throw ConfigError(p.string() + ": ground truth size mismatch");
    }
    for (const auto& mfile : sorted_files(layout.obstacles_dir / im.id, ".png")) {
      SceneObstacle ob{mfile.stem().string(), read_png_mask(mfile)};
      if (ob.mask.width() != w || ob.mask.height() != h) {
        throw ConfigError(mfile.string() + ": obstacle mask does not align with its image");
      }
      im.obstacles.push_back(std::move(ob));
    }
    ds.images.push_back(std::move(im));
  }

  for (const auto& sidecar : sorted_files(layout.cutouts_dir, ".json")) ds.cutouts.push_back(read_cutout(sidecar));
  return ds;
}

void save_dataset(const Dataset& ds, const fs::path& root) {
  const DatasetLayout l = DatasetLayout::under(root);
  for (const auto& d : {l.images_dir, l.cutouts_dir}) fs::create_directories(d);
  write_json(root / "camera.json", ds.camera);
  if (ds.class_colors) {
    Json j = Json::object();
    for (const auto& [k, c] : *ds.class_colors) j[std::to_string(k)] = {c.r, c.g, c.b};
    write_json(root / "class_colors.json", j);
  }
  for (const auto& im : ds.images) {
    write_png_rgb(l.images_dir / (im.id + ".png"), im.image);
    if (im.scene) {
      fs::create_directories(l.scenes_dir);
      write_json(l.scenes_dir / (im.id + ".json"), *im.scene);
    }
    if (im.semantic) {
      fs::create_directories(l.semantic_dir);
      write_png_semantic(l.semantic_dir / (im.id + ".png"), *im.semantic);
    }
    if (im.gt || im.true_horizon_y) {
      fs::create_directories(l.gt_dir);
      Json j = Json::object();
      if (im.true_horizon_y) j["horizon_y"] = *im.true_horizon_y;
      if (im.gt) {
        const auto enc = wire::encode(*im.gt);
        write_png_gray16(l.gt_dir / (im.id + ".png"), enc.pixels);
        j["d_max"] = enc.d_max;
      }
      write_json(l.gt_dir / (im.id + ".json"), j);
    }
    if (!im.obstacles.empty()) {
      const fs::path dir = l.obstacles_dir / im.id;
      fs::create_directories(dir);
      for (const auto& ob : im.obstacles) write_png_mask(dir / (ob.id + ".png"), ob.mask);
    }
  }
  for (std::size_t i = 0; i < ds.cutouts.size(); ++i) {
    const auto& c = ds.cutouts[i];
    char stem_buf[32];
    std::snprintf(stem_buf, sizeof stem_buf, "cutout_%03zu", i);
    const std::string stem = stem_buf;
    write_png_rgba(l.cutouts_dir / (stem + ".png"), c.sprite);
    write_png_mask(l.cutouts_dir / (stem + ".mask.png"), c.measure_mask);
    write_json(l.cutouts_dir / (stem + ".json"), Json{{"sprite", stem + ".png"},
                                                      {"measure_mask", stem + ".mask.png"},
                                                      {"sprite_origin", c.sprite_origin},
                                                      {"ground_contact", c.ground_contact},
                                                      {"source_id", c.source_id},
                                                      {"class_label", c.class_label},
                                                      {"placement_slots", c.placement_slots}});
  }
}

}  // namespace depthprobe
