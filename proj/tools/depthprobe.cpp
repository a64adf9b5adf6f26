// Command-line front end for the depth-cue probing toolkit.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "depthprobe/dataset.hpp"
#include "depthprobe/metrics.hpp"
#include "depthprobe/png_io.hpp"
#include "depthprobe/robustfit.hpp"
#include "depthprobe/runner.hpp"
#include "depthprobe/serialization.hpp"
#include "depthprobe/synthetic.hpp"
#include "depthprobe/version.hpp"
#include "depthprobe/wire.hpp"

namespace fs = std::filesystem;
using namespace depthprobe;

namespace {

Json read_json_file(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw IoError(p.string(), "cannot open");
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw ConfigError(p.string() + ": " + e.what());
  }
}

struct Common {
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::string endpoint;
  std::string dataset;
  int synthetic = 0;
};

Dataset load_input(const Common& c, std::uint64_t seed) {
  if (c.synthetic > 0) {
    SyntheticParams p;
    p.n_scenes = c.synthetic;
    p.seed = seed;
    return make_synthetic_dataset(p);
  }
  return load_dataset(c.dataset.empty() ? DatasetLayout::from_env() : DatasetLayout::under(c.dataset));
}

fs::path sidecar_for(const fs::path& png) {
  std::string s = png.string();
  if (s.size() > 4 && s.substr(s.size() - 4) == ".png") s = s.substr(0, s.size() - 4);
  return s + ".json";
}

DisparityMap read_map(const fs::path& png, const CameraModel& camera) {
  return read_gt_disparity(png, sidecar_for(png), camera);
}

int cmd_synth(const std::string& out, int scenes, const std::string& manipulation, const Common& c) {
  const std::uint64_t seed = c.seed.value_or(0);
  if (scenes > 0) {
    SyntheticParams p;
    p.n_scenes = scenes;
    p.seed = seed;
    save_dataset(make_synthetic_dataset(p), out);
    std::cout << "wrote synthetic dataset with " << scenes << " scenes to " << out << "\n";
    return 0;
  }
  const Dataset ds = load_input(c, seed);
  const ExperimentSpec defaults;
  fs::create_directories(out);
  std::size_t n = 0;
  auto put = [&](const std::string& stem, const ImageBuffer& img) {
    write_png_rgb(fs::path(out) / (stem + ".png"), img);
    ++n;
  };
  for (const auto& im : ds.images) {
    if (manipulation == "pitch") {
      for (int o : defaults.crop_offsets) put(im.id + "_pitch" + std::to_string(o), crop_pitch(im.image, o));
    } else if (manipulation == "roll") {
      for (double a : defaults.roll_angles) {
        put(im.id + "_roll" + std::to_string(static_cast<int>(a)), crop_roll(im.image, a));
      }
    } else if (manipulation == "photometric") {
      const ClassColorTable colors = ds.effective_class_colors();
      for (auto m : defaults.photometric_modes) {
        try {
          put(im.id + "_" + std::string(to_string(m)),
              apply_photometric(im.image, m, im.semantic ? &*im.semantic : nullptr, colors.empty() ? nullptr : &colors));
        } catch (const ConfigError& e) {
          std::cerr << im.id << " " << to_string(m) << ": skipped (" << e.what() << ")\n";
        }
      }
    } else if (manipulation == "flip") {
      put(im.id + "_flip", flip_vertical(im.image));
    } else {
      throw ConfigError("unknown manipulation '" + manipulation + "' (pitch, roll, photometric, flip)");
    }
  }
  std::cout << "wrote " << n << " images to " << out << "\n";
  return 0;
}

int cmd_probe(const std::string& kind, const std::string& config, const std::string& out, const Common& c) {
  ExperimentSpec spec;
  if (!config.empty()) spec = experiment_spec_from_json(read_json_file(config));
  if (!kind.empty()) spec.kind = parse_experiment_kind(kind);
  if (c.seed) spec.seed = *c.seed;
  if (c.workers) spec.workers = *c.workers;
  if (!c.endpoint.empty()) spec.endpoint = ModelEndpoint::parse(c.endpoint);
  const Dataset ds = load_input(c, spec.seed);
  const ExperimentReport rep = run_experiment(spec, ds);
  const auto files = emit_report(rep, out);
  std::size_t ok = 0;
  for (const auto& t : rep.trials) ok += t.status == TrialStatus::Ok;
  std::cout << to_string(rep.kind) << ": " << ok << "/" << rep.trials.size() << " trials ok\n";
  if (rep.regression) {
    std::printf("slope %.4f  r %.4f  N %zu  outliers removed %zu\n", rep.regression->slope, rep.regression->pearson_r,
                rep.regression->n_points, rep.regression->n_outliers_removed);
  }
  if (rep.bracket) {
    std::printf("bracket: prior %.4f <= endpoint %.4f <= geometry %.4f : %s\n", rep.bracket->prior_slope,
                rep.bracket->endpoint_slope, rep.bracket->geometry_slope, rep.bracket->within ? "yes" : "no");
  }
  if (!rep.metric_rows.empty()) std::cout << metric_rows_csv(rep.metric_rows);
  for (const auto& s : rep.skipped_conditions) std::cout << "skipped condition: " << s << "\n";
  std::cout << "wrote " << files.size() << " files to " << out << "\n";
  return 0;
}

int cmd_metrics(const std::string& pred_dir, const std::string& gt_dir, const std::string& camera_file,
                const std::string& out) {
  CameraModel camera;
  if (!camera_file.empty()) camera = read_json_file(camera_file).get<CameraModel>();
  std::vector<MetricSet> sets;
  for (const auto& e : fs::directory_iterator(gt_dir)) {
    if (e.path().extension() != ".png") continue;
    const std::string id = e.path().stem().string();
    const DisparityMap gt = read_map(e.path(), camera);
    const fs::path pred_png = wire::response_png(pred_dir, id);
    if (!fs::exists(pred_png)) {
      std::cerr << id << ": no prediction, skipped\n";
      continue;
    }
    const DisparityMap pred = wire::read_response(pred_dir, id, gt.width(), gt.height());
    sets.push_back(compute_metrics(pred, gt, camera));
  }
  const std::string csv = metric_rows_csv({{kBaselineCondition, mean_metrics(sets)}});
  std::cout << "images evaluated: " << sets.size() << "\n" << csv;
  if (!out.empty()) {
    std::ofstream f(out);
    f << csv;
    if (!f) throw IoError(out, "write failed");
  }
  return 0;
}

int cmd_fit(const std::string& what, const std::string& map_file, std::uint64_t seed) {
  const CameraModel camera;
  const DisparityMap map = read_map(map_file, camera);
  if (what == "horizon") {
    RansacParams p;
    p.seed = seed;
    const HorizonEstimate h = estimate_horizon(map, kGroundRegion, p);
    std::printf("horizon_y %.6f (centered rows)  spread %.6f  repeats %d\n", h.horizon_y, h.spread, h.repeats);
  } else if (what == "roll") {
    const RollEstimate r = estimate_roll(map);
    std::printf("roll_deg %.4f  support %zu\n", r.angle_deg, r.support);
  } else {
    throw ConfigError("fit target must be 'horizon' or 'roll'");
  }
  return 0;
}

int cmd_oracle(const std::string& scene_file, const std::string& mode, int width, int height, const std::string& out,
               std::uint64_t seed) {
  OracleSpec spec;
  from_json(read_json_file(scene_file), spec);
  if (!mode.empty()) spec.mode = parse_oracle_mode(mode);
  if (width <= 0) width = spec.plane.camera.image_w_px;
  if (height <= 0) height = spec.plane.camera.image_h_px;
  const DisparityMap map = render_oracle(spec, width, height, seed);
  const fs::path p(out);
  fs::create_directories(p.parent_path().empty() ? fs::path(".") : p.parent_path());
  wire::write_response(p.parent_path().empty() ? fs::path(".") : p.parent_path(), p.filename().string(), map);
  std::cout << "wrote " << wire::response_png(p.parent_path(), p.filename().string()).string() << "\n";
  return 0;
}

int cmd_report(const std::string& dir, const std::string& out) {
  const ExperimentReport rep = reload_report(dir);
  const auto files = emit_report(rep, out.empty() ? dir : out);
  std::cout << "re-emitted " << files.size() << " files from " << rep.trials.size() << " trials\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Probe which depth cues a monocular depth estimator relies on"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  Common common;
  std::uint64_t seed_value = 0;
  int workers_value = 1;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--seed", seed_value, "Random seed")->each([&](const std::string&) { common.seed = seed_value; });
    sub->add_option("--workers", workers_value, "Concurrent trial workers")->each([&](const std::string&) {
      common.workers = workers_value;
    });
    sub->add_option("--endpoint", common.endpoint, "oracle:geometry | oracle:prior | dir:PATH | cmd:PROGRAM ARGS");
    sub->add_option("--dataset", common.dataset, "Dataset root (default: $DEPTHPROBE_DATASET)");
    sub->add_option("--synthetic", common.synthetic, "Use N generated scenes instead of a dataset");
  };

  std::string out, manipulation = "pitch";
  int scenes = 0;
  auto* synth = app.add_subcommand("synth", "Write manipulated images, or generate a synthetic dataset");
  synth->add_option("--out", out, "Output directory")->required();
  synth->add_option("--scenes", scenes, "Generate a synthetic dataset with this many scenes");
  synth->add_option("--manipulation", manipulation, "pitch | roll | photometric | flip");
  add_common(synth);

  std::string kind, config;
  auto* probe = app.add_subcommand("probe", "Run one experiment and emit its report");
  probe->add_option("kind", kind, "Experiment kind, e.g. pitch-crop");
  probe->add_option("--config", config, "Experiment JSON document");
  probe->add_option("--out", out, "Report directory")->required();
  add_common(probe);

  std::string pred_dir, gt_dir, camera_file;
  auto* metrics = app.add_subcommand("metrics", "Evaluate predicted disparity against ground truth");
  metrics->add_option("--pred", pred_dir, "Directory of <id>.disp.png/.disp.json responses")->required();
  metrics->add_option("--gt", gt_dir, "Directory of <id>.png ground truth")->required();
  metrics->add_option("--camera", camera_file, "Camera JSON");
  metrics->add_option("--out", out, "CSV output file");

  std::string what, map_file;
  auto* fit = app.add_subcommand("fit", "Estimate horizon or roll on one disparity map");
  fit->add_option("what", what, "horizon | roll")->required();
  fit->add_option("--map", map_file, "16-bit disparity PNG with optional JSON sidecar")->required();
  fit->add_option("--seed", seed_value, "RANSAC seed");

  std::string scene_file, mode;
  int width = 0, height = 0;
  auto* oracle = app.add_subcommand("oracle", "Render an oracle disparity map");
  oracle->add_option("--scene", scene_file, "Scene JSON")->required();
  oracle->add_option("--mode", mode, "GeometryAware | FixedPrior");
  oracle->add_option("--width", width, "Output width");
  oracle->add_option("--height", height, "Output height");
  oracle->add_option("--out", out, "Output stem; writes <stem>.disp.png and .disp.json")->required();
  oracle->add_option("--seed", seed_value, "Noise seed");

  std::string report_dir;
  auto* report = app.add_subcommand("report", "Re-emit a report from its trials.csv");
  report->add_option("dir", report_dir, "Directory of an earlier run")->required();
  report->add_option("--out", out, "Output directory (default: in place)");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*synth) return cmd_synth(out, scenes, manipulation, common);
    if (*probe) return cmd_probe(kind, config, out, common);
    if (*metrics) return cmd_metrics(pred_dir, gt_dir, camera_file, out);
    if (*fit) return cmd_fit(what, map_file, seed_value);
    if (*oracle) return cmd_oracle(scene_file, mode, width, height, out, seed_value);
    if (*report) return cmd_report(report_dir, out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
