// Acceptance suite. Prints one line per criterion and exits non-zero if any
// criterion fails. The external-data check is skipped unless
// DEPTHPROBE_EXTERNAL_PRED and DEPTHPROBE_EXTERNAL_GT are set.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "depthprobe/dataset.hpp"
#include "depthprobe/geometry.hpp"
#include "depthprobe/imgsynth.hpp"
#include "depthprobe/metrics.hpp"
#include "depthprobe/oracle.hpp"
#include "depthprobe/png_io.hpp"
#include "depthprobe/robustfit.hpp"
#include "depthprobe/runner.hpp"
#include "depthprobe/serialization.hpp"
#include "depthprobe/synthetic.hpp"
#include "depthprobe/wire.hpp"
#include "../tests/oracles.hpp"

using namespace depthprobe;
namespace fs = std::filesystem;

namespace {

enum class Verdict { Pass, Fail, Skip };

struct Outcome {
  Verdict verdict;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

const Dataset& scenes() {
  static const Dataset d = [] {
    SyntheticParams p;
    p.n_scenes = 20;
    p.seed = 1;
    return make_synthetic_dataset(p);
  }();
  return d;
}

ExperimentSpec oracle_spec(ExperimentKind kind, OracleMode mode) {
  ExperimentSpec s;
  s.kind = kind;
  s.endpoint = ModelEndpoint::parse(mode == OracleMode::GeometryAware ? "oracle:geometry" : "oracle:prior");
  s.bracket = false;
  s.seed = 1;
  return s;
}

std::size_t count_not_ok(const ExperimentReport& rep) {
  std::size_t n = 0;
  for (const auto& t : rep.trials) n += t.status != TrialStatus::Ok;
  return n;
}

Outcome pitch_bracket() {
  const Dataset& ds = scenes();
  const auto t0 = std::chrono::steady_clock::now();
  const ExperimentReport geo = run_pitch_crop(oracle_spec(ExperimentKind::PitchCrop, OracleMode::GeometryAware), ds);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const ExperimentReport pri = run_pitch_crop(oracle_spec(ExperimentKind::PitchCrop, OracleMode::FixedPrior), ds);
  const auto& g = *geo.regression;
  const auto& p = *pri.regression;
  const bool ok = secs < 60.0 && geo.trials.size() == 140 && std::abs(g.slope - 1.0) <= 0.02 && g.pearson_r > 0.999 &&
                  std::abs(p.slope) <= 0.02;
  return {ok ? Verdict::Pass : Verdict::Fail,
          fmt("%zu trials in %.1fs; geometry slope %.4f r %.5f; prior slope %.4f", geo.trials.size(), secs, g.slope,
              g.pearson_r, p.slope)};
}

Outcome roll_bracket() {
  const Dataset& ds = scenes();
  const ExperimentReport geo = run_roll_crop(oracle_spec(ExperimentKind::RollCrop, OracleMode::GeometryAware), ds);
  const ExperimentReport pri = run_roll_crop(oracle_spec(ExperimentKind::RollCrop, OracleMode::FixedPrior), ds);
  double worst = 0.0;
  for (const auto& t : geo.trials) {
    if (t.status == TrialStatus::Ok) worst = std::max(worst, std::abs(*t.y - *t.x));
  }
  const double gs = geo.regression->slope, ps = pri.regression->slope;
  const bool ok = count_not_ok(geo) == 0 && std::abs(gs - 1.0) <= 0.05 && worst <= 0.2 && std::abs(ps) <= 0.05;
  return {ok ? Verdict::Pass : Verdict::Fail,
          fmt("geometry slope %.4f, worst per-angle error %.3f deg, %zu failed trials; prior slope %.4f", gs, worst,
              count_not_ok(geo), ps)};
}

Outcome horizon_fit() {
  const Dataset& ds = scenes();
  double worst_clean = 0.0;
  for (const auto& im : ds.images) {
    OracleSpec s = *im.scene;
    s.noise_sd = 0.0;
    const DisparityMap m = render_oracle(s, 1242, 375);
    worst_clean = std::max(worst_clean, std::abs(estimate_horizon(m).horizon_y - s.plane.horizon_y));
  }

  OracleSpec bare;
  bare.plane.horizon_y = -6.0;
  const DisparityMap clean = render_oracle(bare, 1242, 375);
  const Rect reg = kGroundRegion.resolve(1242, 375);
  int good = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    DisparityMap m = clean;
    std::mt19937_64 rng(5000 + seed);
    std::uniform_real_distribution<double> u(0.0, 1.0), d(0.0, 0.1);
    for (int r = reg.row; r < reg.bottom(); ++r)
      for (int c = reg.col; c < reg.right(); ++c)
        if (u(rng) < 0.2) m.at(c, r) = d(rng);
    RansacParams p;
    p.seed = seed;
    good += std::abs(estimate_horizon(m, kGroundRegion, p).horizon_y - bare.plane.horizon_y) <= 1.0;
  }
  const bool ok = worst_clean <= 0.5 && good >= 95;
  return {ok ? Verdict::Pass : Verdict::Fail,
          fmt("noiseless worst error %.4f px over %zu scenes; %d/100 outlier runs within 1 px", worst_clean,
              ds.images.size(), good)};
}

Outcome position_vs_scale() {
  ExperimentSpec s = oracle_spec(ExperimentKind::PositionVsScale, OracleMode::GeometryAware);
  s.r_sweep.clear();
  for (int k = 0; k <= 20; ++k) s.r_sweep.push_back(1.0 + 0.1 * k);
  const ExperimentReport rep = run_position_vs_scale(s, scenes());
  double worst_tracking = 0.0, worst_scale = 0.0;
  std::size_t n = 0;
  for (const auto& t : rep.trials) {
    if (t.status != TrialStatus::Ok) continue;
    ++n;
    if (*t.placement_mode == to_string(PlacementMode::ScaleOnly)) {
      worst_scale = std::max(worst_scale, std::abs(*t.y - 1.0));
    } else {
      worst_tracking = std::max(worst_tracking, std::abs(*t.y / *t.r - 1.0));
    }
  }
  const bool ok = n > 0 && count_not_ok(rep) == 0 && worst_tracking <= 0.02 && worst_scale <= 0.02;
  return {ok ? Verdict::Pass : Verdict::Fail,
          fmt("%zu trials, %zu failed; position modes worst |y/r-1| %.4f; scale-only worst |y-1| %.4f", n,
              count_not_ok(rep), worst_tracking, worst_scale)};
}

Outcome metrics_equivalence() {
  const CameraModel cam;
  std::mt19937_64 rng(31337);
  double worst = 0.0;
  bool nested = true;
  for (int i = 0; i < 1000; ++i) {
    DisparityMap pred, gt;
    oracle::random_map_pair(rng, 16, 16, pred, gt);
    const MetricSet a = compute_metrics(pred, gt, cam);
    worst = std::max(worst, oracle::max_abs_diff(a, oracle::brute_force_metrics(pred, gt, cam)));
    nested = nested && a.delta1 <= a.delta2 && a.delta2 <= a.delta3;
  }
  DisparityMap pred, gt;
  oracle::random_map_pair(rng, 16, 16, pred, gt);
  const MetricSet id = compute_metrics(gt, gt, cam);
  const bool identity = id.abs_rel == 0 && id.sq_rel == 0 && id.rmse_m == 0 && id.rmse_log == 0 &&
                        id.d1_all_pct == 0 && id.delta1 == 1 && id.delta2 == 1 && id.delta3 == 1;
  const bool ok = worst <= 1e-12 && nested && identity;
  return {ok ? Verdict::Pass : Verdict::Fail,
          fmt("max deviation %.3g over 1000 pairs; identity %s; delta nesting %s", worst, identity ? "exact" : "WRONG",
              nested ? "holds" : "VIOLATED")};
}

Outcome placement_math() {
  const CameraModel cam;
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> ux(-600, 600), uh(-40, 40), udy(0.5, 180), ur(0.2, 5.0);
  double worst = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double h = uh(rng), x = ux(rng), y = h + udy(rng), r = ur(rng), r2 = ur(rng);
    const Placement p = place_at_relative_distance({x, y}, h, r);
    const oracle::Placed q = oracle::place(x, y, h, r);
    worst = std::max({worst, std::abs(p.scale - q.s), std::abs(p.contact.x - q.x), std::abs(p.contact.y - q.y)});
    const double z0 = depth_from_vertical_position(cam, y, h);
    const double z1 = depth_from_vertical_position(cam, p.contact.y, h);
    worst = std::max(worst, std::abs(z1 / (r * z0) - 1.0));
    const Placement twice = place_at_relative_distance(p.contact, h, r2);
    const Placement once = place_at_relative_distance({x, y}, h, r * r2);
    worst = std::max({worst, std::abs(twice.contact.x - once.contact.x), std::abs(twice.contact.y - once.contact.y)});
  }

  ImageBuffer bg(401, 301, Rgb{90, 90, 90});
  const ObjectCutout cut = oracle::box_cutout(61, 41, {30.0, 120.0});
  const PixelCoord sc = mask_centroid(cut.measure_mask);
  const double cx = cut.sprite_origin.x + sc.col, cy = cut.sprite_origin.y + sc.row;
  double worst_centroid = 0.0;
  for (double r : {1.0, 1.5, 2.0, 3.0}) {
    const PasteResult p = paste_object(bg, cut, PlacementMode::PositionAndScale, r, -8.0);
    const PixelCoord got = mask_centroid(p.measure_mask);
    const oracle::Placed want = oracle::place(cx, cy, -8.0, r);
    worst_centroid = std::max({worst_centroid, std::abs(got.col - 200.0 - want.x), std::abs(got.row - 150.0 - want.y)});
  }
  const bool ok = worst <= 1e-9 && worst_centroid <= 1.0;
  return {ok ? Verdict::Pass : Verdict::Fail,
          fmt("1e5 samples worst deviation %.3g; measure centroid worst offset %.3f px", worst, worst_centroid)};
}

Outcome protocol() {
  std::mt19937_64 rng(404);
  double worst_ratio = 0.0;
  for (int t = 0; t < 500; ++t) {
    const double hi = std::uniform_real_distribution<double>(1e-4, 0.95)(rng);
    std::uniform_real_distribution<double> u(0.0, hi);
    DisparityMap m(23, 11);
    for (double& d : m.values.pixels()) d = u(rng);
    const wire::EncodedDisparity e = wire::encode(m);
    const DisparityMap back = wire::decode(e);
    for (std::size_t i = 0; i < m.values.pixels().size(); ++i) {
      worst_ratio = std::max(worst_ratio, std::abs(back.values.pixels()[i] - m.values.pixels()[i]) / (e.d_max / 65535.0));
    }
  }

  oracle::TempDir tmp;
  const fs::path dir = tmp.path();
  const DisparityMap m(8, 6, 0.02);
  auto text = [](const fs::path& p, const std::string& s) { std::ofstream(p) << s; };
  struct Case {
    std::string name, file;
    std::function<void()> corrupt;
    int w = 8;
  };
  const std::vector<Case> cases{
      {"missing", "missing.disp.json", [&] { fs::remove(wire::response_sidecar(dir, "missing")); }},
      {"junk", "junk.disp.json", [&] { text(wire::response_sidecar(dir, "junk"), "{\"d_max\""); }},
      {"dmax", "dmax.disp.json",
       [&] { text(wire::response_sidecar(dir, "dmax"), R"({"d_max": 1.5, "width": 8, "height": 6})"); }},
      {"size", "size.disp.json", [] {}, 9},
      {"depth", "depth.disp.png", [&] { write_png_rgb(wire::response_png(dir, "depth"), ImageBuffer(8, 6)); }},
      {"nopng", "nopng.disp.png", [&] { fs::remove(wire::response_png(dir, "nopng")); }},
  };
  int named = 0;
  std::string misses;
  for (const auto& c : cases) {
    wire::write_response(dir, c.name, m);
    c.corrupt();
    try {
      wire::read_response(dir, c.name, c.w, 6);
      misses += " " + c.name + "(accepted)";
    } catch (const ProtocolError& e) {
      if (fs::path(e.file()).filename() == c.file) {
        ++named;
      } else {
        misses += " " + c.name + "(" + e.file() + ")";
      }
    } catch (const std::exception& e) {
      misses += " " + c.name + "(untyped)";
    }
  }
  const bool ok = worst_ratio <= 1.0 && named == static_cast<int>(cases.size());
  return {ok ? Verdict::Pass : Verdict::Fail,
          fmt("round-trip error %.3f quantization steps max; %d/%zu malformed responses typed and named%s", worst_ratio,
              named, cases.size(), misses.c_str())};
}

Outcome external_data() {
  const char* pred_dir = std::getenv("DEPTHPROBE_EXTERNAL_PRED");
  const char* gt_dir = std::getenv("DEPTHPROBE_EXTERNAL_GT");
  if (!pred_dir || !gt_dir) return {Verdict::Skip, "set DEPTHPROBE_EXTERNAL_PRED and DEPTHPROBE_EXTERNAL_GT to run"};
  CameraModel cam;
  if (const char* cf = std::getenv("DEPTHPROBE_EXTERNAL_CAMERA")) {
    std::ifstream in(cf);
    cam = nlohmann::json::parse(in).get<CameraModel>();
  }
  std::vector<MetricSet> sets;
  for (const auto& e : fs::directory_iterator(gt_dir)) {
    if (e.path().extension() != ".png") continue;
    const std::string id = e.path().stem().string();
    fs::path sidecar = e.path();
    sidecar.replace_extension(".json");
    const DisparityMap gt = read_gt_disparity(e.path(), sidecar, cam);
    if (!fs::exists(wire::response_png(pred_dir, id))) continue;
    const DisparityMap pred = wire::read_response(pred_dir, id, gt.width(), gt.height());
    sets.push_back(compute_metrics(pred, gt, cam));
  }
  if (sets.empty()) return {Verdict::Fail, "no prediction matched a ground-truth file"};
  const MetricSet m = mean_metrics(sets);
  const bool ok = std::abs(m.abs_rel - 0.124) <= 0.002 && std::abs(m.rmse_m - 6.125) <= 0.05 &&
                  std::abs(m.delta1 - 0.841) <= 0.005;
  return {ok ? Verdict::Pass : Verdict::Fail,
          fmt("%zu images: abs_rel %.4f rmse %.3f delta1 %.4f", sets.size(), m.abs_rel, m.rmse_m, m.delta1)};
}

/// The adapter-facing side of the protocol, exercised with the stand-in adapter.
Outcome adapter_conformance() {
  ModelEndpoint echo = ModelEndpoint::parse(std::string("cmd:") + FAKE_ADAPTER_PATH + " --exchange {exchange} --mode echo");
  ModelEndpoint constant =
      ModelEndpoint::parse(std::string("cmd:") + FAKE_ADAPTER_PATH + " --exchange {exchange} --mode constant:0.02");
  echo.timeout_s = constant.timeout_s = 30;
  std::vector<ImageBuffer> imgs;
  for (int i = 0; i < 3; ++i) {
    ImageBuffer img(40, 12);
    for (int r = 0; r < 12; ++r)
      for (int c = 0; c < 40; ++c) img.at(c, r) = Rgb{static_cast<std::uint8_t>(5 * c + 20 * i), 0, 0};
    imgs.push_back(img);
  }
  double worst = 0.0;
  const auto maps = request_disparity(echo, imgs);
  for (std::size_t i = 0; i < imgs.size(); ++i) {
    const double d_max = 0.001 + 0.1 * (5 * 39 + 20 * static_cast<int>(i)) / 255.0;
    for (int c = 0; c < 40; ++c) {
      const double want = 0.001 + 0.1 * imgs[i].at(c, 0).r / 255.0;
      worst = std::max(worst, std::abs(maps[i].at(c, 5) - want) / (d_max / 65535.0));
    }
  }
  double worst_const = 0.0;
  for (const auto& m : request_disparity(constant, imgs)) {
    for (double d : m.values.pixels()) worst_const = std::max(worst_const, std::abs(d - 0.02) / (0.02 / 65535.0));
  }
  const bool ok = worst <= 1.0 && worst_const <= 1.0;
  return {ok ? Verdict::Pass : Verdict::Fail,
          fmt("echo worst %.3f steps; constant worst %.3f steps", worst, worst_const)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> checks{
      {"oracle bracket, pitch", pitch_bracket},
      {"oracle bracket, roll", roll_bracket},
      {"horizon fit", horizon_fit},
      {"position vs scale closed loop", position_vs_scale},
      {"metrics equivalence", metrics_equivalence},
      {"placement math", placement_math},
      {"protocol round trip and typed errors", protocol},
      {"external data reference row", external_data},
      {"adapter conformance (stand-in adapter)", adapter_conformance},
  };
  int failed = 0;
  for (const auto& [name, check] : checks) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {Verdict::Fail, std::string("threw: ") + e.what()};
    }
    const char* tag = o.verdict == Verdict::Pass ? "PASS" : o.verdict == Verdict::Skip ? "SKIP" : "FAIL";
    failed += o.verdict == Verdict::Fail;
    std::printf("%s  %-40s %s\n", tag, name.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d check(s) failed\n", failed);
  return failed == 0 ? 0 : 1;
}
