#include "depthprobe/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <thread>

#include "depthprobe/serialization.hpp"
#include "depthprobe/version.hpp"

namespace depthprobe {

namespace {

void record_failure(TrialRecord& rec, std::exception_ptr ep) {
  try {
    std::rethrow_exception(ep);
  } catch (const ModelError& e) {
    rec.status = TrialStatus::ModelError;
    rec.reason = e.what();
  } catch (const EndpointTimeoutError& e) {
    rec.status = TrialStatus::ModelError;
    rec.reason = e.what();
  } catch (const ProtocolError& e) {
    rec.status = TrialStatus::ModelError;
    rec.reason = e.what();
  } catch (const FitError& e) {
    rec.status = TrialStatus::FitError;
    rec.reason = e.what();
  } catch (const std::exception& e) {
    rec.status = TrialStatus::Skipped;
    rec.reason = e.what();
  }
}

void skip(TrialRecord& rec, std::string reason) {
  rec.status = TrialStatus::Skipped;
  rec.reason = std::move(reason);
}

template <class F>
void parallel_for(std::size_t n, int workers, F&& fn) {
  const std::size_t threads = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, workers)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

/// One model query and the trials measured on its answer.
struct Pending {
  ImageBuffer image;
  std::optional<OracleSpec> hint;
  std::vector<TrialRecord> records;
  std::function<void(const DisparityMap&, std::size_t, TrialRecord&)> measure;
};

/// Queries every pending item that synthesized cleanly, in batches of at
/// most max_batch, then runs the measurements. Failures land on the records.
std::vector<TrialRecord> execute(ModelSession& session, std::vector<Pending>& items) {
  std::vector<std::size_t> live;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (std::all_of(items[i].records.begin(), items[i].records.end(),
                    [](const TrialRecord& r) { return r.status == TrialStatus::Ok; })) {
      live.push_back(i);
    }
  }
  const std::size_t max_batch = session.endpoint().max_batch;
  // Items with and without scene hints never share a batch, so a hint-less
  // item sent to an oracle cannot fail its neighbours.
  for (std::size_t start = 0, end = 0; start < live.size(); start = end) {
    end = start + 1;
    const bool hinted = items[live[start]].hint.has_value();
    while (end < live.size() && end - start < max_batch && items[live[end]].hint.has_value() == hinted) ++end;
    std::vector<ImageBuffer> images;
    std::vector<std::optional<OracleSpec>> hints;
    for (std::size_t k = start; k < end; ++k) {
      images.push_back(items[live[k]].image);
      hints.push_back(items[live[k]].hint);
    }
    std::vector<DisparityMap> maps;
    try {
      maps = session.request(images, hints);
    } catch (...) {
      const auto ep = std::current_exception();
      for (std::size_t k = start; k < end; ++k) {
        for (auto& rec : items[live[k]].records) record_failure(rec, ep);
      }
      continue;
    }
    for (std::size_t k = start; k < end; ++k) {
      Pending& p = items[live[k]];
      for (std::size_t m = 0; m < p.records.size(); ++m) {
        try {
          p.measure(maps[k - start], m, p.records[m]);
        } catch (...) {
          record_failure(p.records[m], std::current_exception());
        }
      }
    }
  }
  std::vector<TrialRecord> out;
  for (auto& p : items) {
    for (auto& r : p.records) out.push_back(std::move(r));
  }
  return out;
}

TrialRecord make_record(ExperimentKind kind, const std::string& image_id, const std::string& family = {}) {
  TrialRecord r;
  r.kind = kind;
  r.image_id = image_id;
  r.family = family;
  return r;
}

std::optional<double> scene_horizon(const SceneImage& im) {
  if (im.scene) return im.scene->plane.horizon_y;
  return im.true_horizon_y;
}

/// Axis-aligned polygon around the set pixels of `mask`, in centered coordinates.
std::vector<CenteredCoord> bbox_polygon(const Mask& mask) {
  const auto b = mask_bounds(mask);
  if (!b) throw DomainError("empty footprint");
  const PixelCoord center = image_center(mask.width(), mask.height());
  const double x0 = b->col - 0.5 - center.col, x1 = b->right() - 0.5 - center.col;
  const double y0 = b->row - 0.5 - center.row, y1 = b->bottom() - 0.5 - center.row;
  return {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}};
}

/// Scene hint with an extra obstacle, or nullopt without a base scene.
std::optional<OracleSpec> with_obstacle(const SceneImage& im, std::vector<CenteredCoord> footprint, double depth_m) {
  if (!im.scene) return std::nullopt;
  OracleSpec s = *im.scene;
  s.obstacles.push_back({std::move(footprint), depth_m});
  return s;
}

/// Per-pixel footprint disparity minus the mean ground disparity on the same
/// row, sampled from flanks one footprint-width wide on both sides.
double detection_score(const DisparityMap& map, const Mask& footprint, const std::vector<const Mask*>& exclude) {
  const auto b = mask_bounds(footprint);
  if (!b) throw DomainError("probe footprint is empty");
  double sum = 0.0;
  std::size_t n = 0;
  for (int r = b->row; r < b->bottom(); ++r) {
    double gsum = 0.0;
    std::size_t gn = 0;
    auto flank = [&](int c0, int c1) {
      for (int c = std::max(0, c0); c < std::min(map.width(), c1); ++c) {
        if (footprint.at(c, r) || !map.is_valid(c, r)) continue;
        if (std::any_of(exclude.begin(), exclude.end(), [&](const Mask* m) { return m->at(c, r) != 0; })) continue;
        gsum += map.at(c, r);
        ++gn;
      }
    };
    flank(b->col - b->width, b->col);
    flank(b->right(), b->right() + b->width);
    if (gn == 0) continue;
    const double ground = gsum / static_cast<double>(gn);
    for (int c = b->col; c < b->right(); ++c) {
      if (!footprint.at(c, r) || !map.is_valid(c, r)) continue;
      sum += map.at(c, r) - ground;
      ++n;
    }
  }
  if (n == 0) throw DomainError("no ground flank next to the probe footprint");
  return sum / static_cast<double>(n);
}

ImageBuffer side_by_side(const ImageBuffer& left, const ImageBuffer& right) {
  ImageBuffer out(left.width() + right.width(), std::max(left.height(), right.height()));
  for (int r = 0; r < left.height(); ++r) {
    for (int c = 0; c < left.width(); ++c) out.at(c, r) = left.at(c, r);
  }
  for (int r = 0; r < right.height(); ++r) {
    for (int c = 0; c < right.width(); ++c) out.at(left.width() + c, r) = right.at(c, r);
  }
  return out;
}

RansacParams seeded_ransac(const ExperimentSpec& spec) {
  RansacParams p = spec.ransac;
  p.seed += spec.seed;
  return p;
}

ExperimentReport start_report(const ExperimentSpec& spec, const Dataset& ds) {
  spec.validate();
  ExperimentReport rep;
  rep.kind = spec.kind;
  rep.spec_echo = experiment_spec_to_json(spec);
  rep.provenance = Json{{"tool", "depthprobe"},
                        {"version", kVersion},
                        {"seed", spec.seed},
                        {"endpoint", spec.endpoint.describe()},
                        {"camera", ds.camera},
                        {"dataset", {{"images", ds.images.size()}, {"cutouts", ds.cutouts.size()}}},
                        {"defaults",
                         {{"ransac", spec.ransac},
                          {"ground_region", spec.ground_region},
                          {"horizon_repeats", spec.horizon_repeats},
                          {"band", {spec.band.lo, spec.band.hi}},
                          {"hough", spec.hough},
                          {"depth_cap_m", spec.eval.depth_cap_m},
                          {"min_depth_m", spec.eval.min_depth_m},
                          {"eval_crop", spec.eval.eval_crop},
                          {"outlier_threshold_sd", std::isfinite(spec.outlier_threshold_sd)
                                                       ? Json(spec.outlier_threshold_sd)
                                                       : Json("inf")}}}};
  return rep;
}

void finish_report(ExperimentReport& rep, const ExperimentSpec& spec) {
  const bool any_ok = std::any_of(rep.trials.begin(), rep.trials.end(),
                                  [](const TrialRecord& t) { return t.status == TrialStatus::Ok; });
  if (!any_ok) {
    std::string why = rep.trials.empty() ? "no trials could be formed from the dataset" : rep.trials.front().reason;
    throw EvaluationError(std::string(to_string(rep.kind)) + ": every trial failed (" + why + ")");
  }
  summarize(rep, spec.outlier_threshold_sd, spec.comparison);
}

/// Runs per-item jobs concurrently and concatenates their trials in item order.
template <class Job>
std::vector<TrialRecord> run_jobs(const ExperimentSpec& spec, ModelSession& session, std::size_t n, Job&& job) {
  std::vector<std::vector<TrialRecord>> slots(n);
  parallel_for(n, spec.workers, [&](std::size_t i) {
    std::vector<Pending> items = job(i);
    slots[i] = execute(session, items);
  });
  std::vector<TrialRecord> out;
  for (auto& s : slots) {
    for (auto& t : s) out.push_back(std::move(t));
  }
  return out;
}

/// Sets `y` on every ok trial to f(trial value, reference value) where the
/// reference is the ok trial of the same group with `is_ref` set.
template <class Key, class IsRef, class Value, class Combine>
void normalize(std::vector<TrialRecord>& trials, Key key, IsRef is_ref, Value value, Combine combine,
               const char* missing_reason) {
  std::map<decltype(key(trials.front())), double> refs;
  for (const auto& t : trials) {
    if (t.status == TrialStatus::Ok && is_ref(t)) refs[key(t)] = value(t);
  }
  for (auto& t : trials) {
    if (t.status != TrialStatus::Ok) continue;
    const auto it = refs.find(key(t));
    if (it == refs.end()) {
      skip(t, missing_reason);
      continue;
    }
    try {
      t.y = combine(value(t), it->second);
    } catch (const std::exception& e) {
      skip(t, e.what());
    }
  }
}

std::optional<BracketCheck> run_bracket(const ExperimentSpec& spec, const Dataset& ds, double endpoint_slope) {
  if (!spec.bracket) return std::nullopt;
  if (std::any_of(ds.images.begin(), ds.images.end(), [](const SceneImage& im) { return !im.scene; })) {
    return std::nullopt;
  }
  try {
    auto slope_with = [&](OracleMode mode) {
      ExperimentSpec s = spec;
      s.bracket = false;
      s.endpoint = ModelEndpoint{};
      s.endpoint.oracle_mode = mode;
      const ExperimentReport r = run_experiment(s, ds);
      if (!r.regression) throw StatisticsError("no regression");
      return r.regression->slope;
    };
    BracketCheck b;
    b.geometry_slope = slope_with(OracleMode::GeometryAware);
    b.prior_slope = slope_with(OracleMode::FixedPrior);
    b.endpoint_slope = endpoint_slope;
    constexpr double kTol = 1e-9;
    b.within = b.prior_slope - kTol <= endpoint_slope && endpoint_slope <= b.geometry_slope + kTol;
    return b;
  } catch (const Error&) {
    return std::nullopt;
  }
}

}  // namespace

ImageBuffer colorize_disparity(const DisparityMap& map) {
  double hi = 0.0;
  for (double d : map.values.pixels()) {
    if (std::isfinite(d)) hi = std::max(hi, d);
  }
  ImageBuffer out(map.width(), map.height());
  for (int r = 0; r < map.height(); ++r) {
    for (int c = 0; c < map.width(); ++c) {
      const double v = hi > 0.0 && map.is_valid(c, r) ? map.at(c, r) / hi : 0.0;
      const auto g = static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
      out.at(c, r) = {g, g, g};
    }
  }
  return out;
}

std::vector<ProbeSpec> default_probes(const Dataset& ds) {
  std::vector<ProbeSpec> probes;
  double h = 0.0;
  for (const auto& im : ds.images) {
    if (const auto hz = scene_horizon(im)) h = std::max(h, *hz);
  }
  const double base = h + 100.0;
  ProbeSpec tri;
  tri.id = "triangle";
  tri.kind = ProbeKind::Shape;
  tri.polygon = {{-40.0, base}, {40.0, base}, {0.0, base - 60.0}};
  probes.push_back(tri);
  tri.id = "triangle-unregistered";
  tri.register_obstacle = false;
  probes.push_back(tri);
  if (ds.cutouts.empty()) return probes;

  const std::vector<std::pair<std::string, std::set<SpritePart>>> subsets{
      {"edges-all", {SpritePart::Bottom, SpritePart::Left, SpritePart::Right, SpritePart::Top, SpritePart::Interior}},
      {"edges-bottom-sides", {SpritePart::Bottom, SpritePart::Left, SpritePart::Right}},
      {"edges-no-bottom", {SpritePart::Left, SpritePart::Right, SpritePart::Top, SpritePart::Interior}},
      {"edges-interior", {SpritePart::Interior}}};
  for (const auto& [id, parts] : subsets) {
    ProbeSpec p;
    p.id = id;
    p.kind = ProbeKind::Edges;
    p.parts = parts;
    probes.push_back(p);
  }
  ProbeSpec sh;
  sh.kind = ProbeKind::Shadow;
  sh.id = "shadow-off";
  probes.push_back(sh);
  sh.id = "shadow-on";
  sh.with_shadow = true;
  probes.push_back(sh);
  return probes;
}

ExperimentReport run_position_vs_scale(const ExperimentSpec& spec, const Dataset& ds) {
  ExperimentReport rep = start_report(spec, ds);
  std::vector<std::pair<std::size_t, std::string>> jobs;
  for (std::size_t ci = 0; ci < ds.cutouts.size(); ++ci) {
    for (const auto& slot : ds.cutouts[ci].placement_slots) jobs.emplace_back(ci, slot);
  }
  ModelSession session(spec.endpoint);
  rep.trials = run_jobs(spec, session, jobs.size(), [&](std::size_t j) {
    const auto& [ci, slot] = jobs[j];
    const ObjectCutout& cut = ds.cutouts[ci];
    const std::string family = "cutout_" + std::to_string(ci);
    const SceneImage* im = ds.find(slot);
    std::vector<Pending> items;
    for (auto mode : spec.placement_modes) {
      for (double r : spec.r_sweep) {
        Pending p;
        TrialRecord rec = make_record(rep.kind, slot, family);
        rec.r = r;
        rec.placement_mode = std::string(to_string(mode));
        rec.curve = *rec.placement_mode;
        rec.x = r;
        p.records.push_back(rec);
        try {
          if (im == nullptr) throw ConfigError("slot image '" + slot + "' is not in the dataset");
          const auto horizon = scene_horizon(*im);
          if (!horizon) throw ConfigError("no horizon known for slot image '" + slot + "'");
          PasteResult pasted = paste_object(im->image, cut, mode, r, *horizon);
          const double depth = depth_from_vertical_position(ds.camera, pasted.contact.y, *horizon);
          p.hint = with_obstacle(*im, bbox_polygon(pasted.support), depth);
          p.image = std::move(pasted.image);
          p.measure = [mask = std::move(pasted.measure_mask)](const DisparityMap& map, std::size_t,
                                                              TrialRecord& t) {
            t.region_mean_disparity = region_mean_disparity(map, mask);
          };
        } catch (...) {
          record_failure(p.records.front(), std::current_exception());
        }
        items.push_back(std::move(p));
      }
    }
    return items;
  });
  normalize(
      rep.trials,
      [](const TrialRecord& t) { return t.image_id + "|" + t.family + "|" + *t.placement_mode; },
      [](const TrialRecord& t) { return *t.r == 1.0; }, [](const TrialRecord& t) { return *t.region_mean_disparity; },
      [](double v, double ref) {
        if (!(v > 0.0)) throw DomainError("non-positive region disparity");
        return ref / v;
      },
      "reference trial at r = 1 failed");
  finish_report(rep, spec);
  return rep;
}

ExperimentReport run_pitch_crop(const ExperimentSpec& spec, const Dataset& ds) {
  ExperimentReport rep = start_report(spec, ds);
  ModelSession session(spec.endpoint);
  const RansacParams ransac = seeded_ransac(spec);
  rep.trials = run_jobs(spec, session, ds.images.size(), [&](std::size_t i) {
    const SceneImage& im = ds.images[i];
    std::vector<Pending> items;
    for (int o : spec.crop_offsets) {
      Pending p;
      TrialRecord rec = make_record(rep.kind, im.id);
      rec.offset_px = o;
      rec.curve = "horizon_shift";
      rec.x = -static_cast<double>(o);
      p.records.push_back(rec);
      try {
        p.image = crop_pitch(im.image, o, spec.pitch_crop_h_frac, spec.pitch_crop_w_frac);
        if (im.scene) p.hint = pitch_crop_scene(*im.scene, o);
        p.measure = [&](const DisparityMap& map, std::size_t, TrialRecord& t) {
          t.horizon_y = estimate_horizon(map, spec.ground_region, ransac, spec.horizon_repeats).horizon_y;
        };
      } catch (...) {
        record_failure(p.records.front(), std::current_exception());
      }
      items.push_back(std::move(p));
    }
    return items;
  });
  normalize(
      rep.trials, [](const TrialRecord& t) { return t.image_id; }, [](const TrialRecord& t) { return *t.offset_px == 0; },
      [](const TrialRecord& t) { return *t.horizon_y; }, [](double v, double ref) { return v - ref; },
      "reference crop at offset 0 failed");
  finish_report(rep, spec);
  if (rep.regression) rep.bracket = run_bracket(spec, ds, rep.regression->slope);
  return rep;
}

ExperimentReport run_pitch_horizon_natural(const ExperimentSpec& spec, const Dataset& ds) {
  ExperimentReport rep = start_report(spec, ds);
  ModelSession session(spec.endpoint);
  const RansacParams ransac = seeded_ransac(spec);
  rep.trials = run_jobs(spec, session, ds.images.size(), [&](std::size_t i) {
    const SceneImage& im = ds.images[i];
    std::vector<Pending> items(1);
    Pending& p = items.front();
    TrialRecord rec = make_record(rep.kind, im.id);
    if (!im.true_horizon_y) {
      skip(rec, "no ground-truth horizon");
      p.records.push_back(rec);
      return items;
    }
    rec.curve = "natural_horizon";
    rec.x = *im.true_horizon_y;
    p.records.push_back(rec);
    p.image = im.image;
    p.hint = im.scene;
    p.measure = [&](const DisparityMap& map, std::size_t, TrialRecord& t) {
      t.horizon_y = estimate_horizon(map, spec.ground_region, ransac, spec.horizon_repeats).horizon_y;
      t.y = t.horizon_y;
    };
    return items;
  });
  finish_report(rep, spec);
  return rep;
}

ExperimentReport run_pitch_vs_obstacle_disparity(const ExperimentSpec& spec, const Dataset& ds) {
  ExperimentReport rep = start_report(spec, ds);
  ModelSession session(spec.endpoint);
  rep.trials = run_jobs(spec, session, ds.images.size(), [&](std::size_t i) {
    const SceneImage& im = ds.images[i];
    std::vector<Pending> items;
    if (im.obstacles.empty()) return items;
    for (int o : spec.crop_offsets) {
      Pending p;
      std::vector<Mask> masks;
      for (const auto& ob : im.obstacles) {
        TrialRecord rec = make_record(rep.kind, im.id, ob.id);
        rec.offset_px = o;
        rec.curve = "relative_disparity";
        rec.x = o;
        p.records.push_back(rec);
      }
      try {
        const Rect window =
            pitch_window(im.image.width(), im.image.height(), o, spec.pitch_crop_h_frac, spec.pitch_crop_w_frac);
        p.image = crop(im.image, window);
        if (im.scene) p.hint = pitch_crop_scene(*im.scene, o);
        for (const auto& ob : im.obstacles) masks.push_back(crop(ob.mask, window));
        p.measure = [masks = std::move(masks)](const DisparityMap& map, std::size_t k, TrialRecord& t) {
          if (mask_count(masks[k]) == 0) throw DomainError("obstacle mask is empty inside the crop");
          t.region_mean_disparity = region_mean_disparity(map, masks[k]);
        };
      } catch (...) {
        const auto ep = std::current_exception();
        for (auto& r : p.records) record_failure(r, ep);
      }
      items.push_back(std::move(p));
    }
    return items;
  });
  normalize(
      rep.trials, [](const TrialRecord& t) { return t.image_id + "|" + t.family; },
      [](const TrialRecord& t) { return *t.offset_px == 0; },
      [](const TrialRecord& t) { return *t.region_mean_disparity; },
      [](double v, double ref) {
        if (!(ref > 0.0)) throw DomainError("reference obstacle disparity is zero");
        return v / ref;
      },
      "reference crop at offset 0 failed");
  finish_report(rep, spec);
  return rep;
}

ExperimentReport run_roll_crop(const ExperimentSpec& spec, const Dataset& ds) {
  ExperimentReport rep = start_report(spec, ds);
  ModelSession session(spec.endpoint);
  rep.trials = run_jobs(spec, session, ds.images.size(), [&](std::size_t i) {
    const SceneImage& im = ds.images[i];
    std::vector<Pending> items;
    for (double a : spec.roll_angles) {
      Pending p;
      TrialRecord rec = make_record(rep.kind, im.id);
      rec.angle_deg = a;
      rec.curve = "roll_shift";
      rec.x = a;
      p.records.push_back(rec);
      try {
        p.image = crop_roll(im.image, a, spec.roll_crop_h_frac, spec.roll_crop_w_frac);
        if (im.scene) p.hint = roll_crop_scene(*im.scene, a);
        p.measure = [&](const DisparityMap& map, std::size_t, TrialRecord& t) {
          t.roll_deg = estimate_roll(map, spec.band, spec.hough).angle_deg;
        };
      } catch (...) {
        record_failure(p.records.front(), std::current_exception());
      }
      items.push_back(std::move(p));
    }
    return items;
  });
  // The crop rotates content by -angle, so the estimated camera roll change
  // is the negated change of the fitted line angle.
  normalize(
      rep.trials, [](const TrialRecord& t) { return t.image_id; }, [](const TrialRecord& t) { return *t.angle_deg == 0.0; },
      [](const TrialRecord& t) { return *t.roll_deg; }, [](double v, double ref) { return -(v - ref); },
      "reference crop at angle 0 failed");
  finish_report(rep, spec);
  if (rep.regression) rep.bracket = run_bracket(spec, ds, rep.regression->slope);
  return rep;
}

ExperimentReport run_photometric_suite(const ExperimentSpec& spec, const Dataset& ds) {
  ExperimentReport rep = start_report(spec, ds);
  ModelSession session(spec.endpoint);
  const ClassColorTable colors = ds.effective_class_colors();
  rep.trials = run_jobs(spec, session, ds.images.size(), [&](std::size_t i) {
    const SceneImage& im = ds.images[i];
    std::vector<Pending> items;
    for (auto mode : spec.photometric_modes) {
      Pending p;
      TrialRecord rec = make_record(rep.kind, im.id);
      rec.photometric_mode = std::string(to_string(mode));
      p.records.push_back(rec);
      try {
        if (!im.gt) throw ConfigError("no ground truth for image");
        p.image = apply_photometric(im.image, mode, im.semantic ? &*im.semantic : nullptr,
                                    colors.empty() ? nullptr : &colors);
        p.hint = im.scene;
        p.measure = [&](const DisparityMap& map, std::size_t, TrialRecord& t) {
          t.metrics = compute_metrics(map, *im.gt, ds.camera, spec.eval);
        };
      } catch (...) {
        record_failure(p.records.front(), std::current_exception());
      }
      items.push_back(std::move(p));
    }
    return items;
  });
  finish_report(rep, spec);
  return rep;
}

ExperimentReport run_recognition_probes(const ExperimentSpec& spec, const Dataset& ds) {
  ExperimentReport rep = start_report(spec, ds);
  const std::vector<ProbeSpec> probes = spec.probes.empty() ? default_probes(ds) : spec.probes;
  std::vector<std::pair<std::size_t, std::size_t>> jobs;
  for (std::size_t pi = 0; pi < probes.size(); ++pi) {
    for (std::size_t ii = 0; ii < ds.images.size(); ++ii) {
      const auto& ids = probes[pi].image_ids;
      if (ids.empty() || std::find(ids.begin(), ids.end(), ds.images[ii].id) != ids.end()) jobs.emplace_back(pi, ii);
    }
  }
  // The first image of each probe gets a panel.
  std::vector<bool> wants_panel(jobs.size(), false);
  for (std::size_t j = 0; j < jobs.size(); ++j) wants_panel[j] = j == 0 || jobs[j].first != jobs[j - 1].first;
  std::vector<std::optional<std::pair<std::string, ImageBuffer>>> panels(jobs.size());

  ModelSession session(spec.endpoint);
  rep.trials = run_jobs(spec, session, jobs.size(), [&](std::size_t j) {
    const ProbeSpec& probe = probes[jobs[j].first];
    const SceneImage& im = ds.images[jobs[j].second];
    std::vector<Pending> items(1);
    Pending& p = items.front();
    TrialRecord rec = make_record(rep.kind, im.id, probe.id);
    rec.probe_id = probe.id;
    p.records.push_back(rec);
    try {
      const auto horizon = scene_horizon(im);
      if (!horizon) throw ConfigError("no horizon known for image");
      Mask footprint;
      std::vector<CenteredCoord> polygon;
      double contact_y = 0.0;
      if (probe.kind == ProbeKind::Shape) {
        ShapeResult s = paste_shape(im.image, probe.polygon, probe.color);
        p.image = std::move(s.image);
        footprint = std::move(s.mask);
        polygon = probe.polygon;
        contact_y = s.ground_contact.y;
      } else {
        if (probe.cutout >= ds.cutouts.size()) throw ConfigError("probe '" + probe.id + "' names a missing cutout");
        const ObjectCutout& cut = ds.cutouts[probe.cutout];
        PasteResult pr = probe.kind == ProbeKind::Edges
                             ? edge_ablation(im.image, cut, probe.parts, probe.band_px)
                             : paste_object(im.image, cut, PlacementMode::PositionAndScale, 1.0, *horizon);
        p.image = std::move(pr.image);
        if (probe.kind == ProbeKind::Shadow && probe.with_shadow) {
          p.image = add_shadow(p.image, *mask_bounds(pr.support), probe.shadow);
        }
        footprint = std::move(pr.support);
        polygon = bbox_polygon(footprint);
        contact_y = cut.ground_contact.y;
      }
      const double implied = depth_from_vertical_position(ds.camera, contact_y, *horizon);
      p.records.front().implied_distance_m = implied;
      p.hint = probe.register_obstacle ? with_obstacle(im, polygon, implied) : im.scene;
      p.measure = [&ds, &panels, &probe, &im, j, footprint = std::move(footprint),
                   manipulated = wants_panel[j] ? p.image : ImageBuffer{}](
                      const DisparityMap& map, std::size_t, TrialRecord& t) {
        std::vector<const Mask*> exclude;
        for (const auto& ob : im.obstacles) exclude.push_back(&ob.mask);
        t.detection_score = detection_score(map, footprint, exclude);
        t.region_mean_disparity = region_mean_disparity(map, footprint);
        if (*t.region_mean_disparity > 0.0) {
          t.estimated_distance_m = depth_from_disparity(ds.camera, *t.region_mean_disparity);
        }
        if (!manipulated.empty()) {
          panels[j] = std::make_pair(probe.id + "_" + im.id, side_by_side(manipulated, colorize_disparity(map)));
        }
      };
    } catch (...) {
      record_failure(p.records.front(), std::current_exception());
    }
    return items;
  });
  for (auto& panel : panels) {
    if (panel) rep.panels.push_back(std::move(*panel));
  }
  finish_report(rep, spec);
  return rep;
}

ExperimentReport run_context_and_flip(const ExperimentSpec& spec, const Dataset& ds) {
  ExperimentReport rep = start_report(spec, ds);
  ModelSession session(spec.endpoint);

  std::vector<TrialRecord> context = run_jobs(spec, session, ds.cutouts.size(), [&](std::size_t ci) {
    const ObjectCutout& cut = ds.cutouts[ci];
    std::vector<Pending> items;
    for (std::size_t si = 0; si < cut.placement_slots.size(); ++si) {
      const std::string& slot = cut.placement_slots[si];
      Pending p;
      TrialRecord rec = make_record(rep.kind, slot, "cutout_" + std::to_string(ci));
      rec.probe_id = "context";
      rec.curve = "context_swap";
      rec.x = static_cast<double>(si);
      p.records.push_back(rec);
      try {
        const SceneImage* im = ds.find(slot);
        if (im == nullptr) throw ConfigError("slot image '" + slot + "' is not in the dataset");
        const auto horizon = scene_horizon(*im);
        if (!horizon) throw ConfigError("no horizon known for slot image '" + slot + "'");
        PasteResult pr = context_swap(cut, im->image, slot);
        const double depth = depth_from_vertical_position(ds.camera, pr.contact.y, *horizon);
        p.records.front().implied_distance_m = depth;
        p.hint = with_obstacle(*im, bbox_polygon(pr.support), depth);
        p.image = std::move(pr.image);
        p.measure = [mask = std::move(pr.measure_mask)](const DisparityMap& map, std::size_t, TrialRecord& t) {
          t.region_mean_disparity = region_mean_disparity(map, mask);
        };
      } catch (...) {
        record_failure(p.records.front(), std::current_exception());
      }
      items.push_back(std::move(p));
    }
    return items;
  });
  std::map<std::string, std::string> source_of;
  for (std::size_t ci = 0; ci < ds.cutouts.size(); ++ci) source_of["cutout_" + std::to_string(ci)] = ds.cutouts[ci].source_id;
  // Disparity relative to the cutout's own source frame.
  if (!context.empty()) {
    normalize(
        context, [](const TrialRecord& t) { return t.family; },
        [&](const TrialRecord& t) { return t.image_id == source_of[t.family]; },
        [](const TrialRecord& t) { return *t.region_mean_disparity; },
        [](double v, double ref) {
          if (!(ref > 0.0)) throw DomainError("reference disparity is zero");
          return v / ref;
        },
        "cutout not measured in its source frame");
  }

  std::vector<TrialRecord> flips = run_jobs(spec, session, ds.images.size(), [&](std::size_t i) {
    const SceneImage& im = ds.images[i];
    std::vector<Pending> items;
    if (im.obstacles.empty()) return items;
    for (bool flipped : {false, true}) {
      Pending p;
      std::vector<Mask> masks;
      for (const auto& ob : im.obstacles) {
        TrialRecord rec = make_record(rep.kind, im.id, ob.id);
        rec.probe_id = flipped ? "flip" : "upright";
        rec.curve = "vertical_flip";
        rec.x = flipped ? 1.0 : 0.0;
        if (flipped && session.endpoint().kind == EndpointKind::BuiltinOracle) {
          rec.status = TrialStatus::Skipped;
          rec.reason = "oracle endpoints do not model flipped images";
        }
        p.records.push_back(rec);
        masks.push_back(flipped ? flip_vertical(ob.mask) : ob.mask);
      }
      p.image = flipped ? flip_vertical(im.image) : im.image;
      // Oracle scenes describe upright geometry only.
      if (!flipped) p.hint = im.scene;
      p.measure = [masks = std::move(masks)](const DisparityMap& map, std::size_t k, TrialRecord& t) {
        t.region_mean_disparity = region_mean_disparity(map, masks[k]);
      };
      items.push_back(std::move(p));
    }
    return items;
  });
  if (!flips.empty()) {
    normalize(
        flips, [](const TrialRecord& t) { return t.image_id + "|" + t.family; },
        [](const TrialRecord& t) { return *t.probe_id == "upright"; },
        [](const TrialRecord& t) { return *t.region_mean_disparity; },
        [](double v, double ref) {
          if (!(ref > 0.0)) throw DomainError("upright obstacle disparity is zero");
          return v / ref;
        },
        "upright reference failed");
  }
  rep.trials = std::move(context);
  for (auto& t : flips) rep.trials.push_back(std::move(t));
  finish_report(rep, spec);
  return rep;
}

ExperimentReport run_experiment(const ExperimentSpec& spec, const Dataset& ds) {
  switch (spec.kind) {
    case ExperimentKind::PositionVsScale: return run_position_vs_scale(spec, ds);
    case ExperimentKind::PitchHorizonNatural: return run_pitch_horizon_natural(spec, ds);
    case ExperimentKind::PitchCrop: return run_pitch_crop(spec, ds);
    case ExperimentKind::PitchVsObstacleDisparity: return run_pitch_vs_obstacle_disparity(spec, ds);
    case ExperimentKind::RollCrop: return run_roll_crop(spec, ds);
    case ExperimentKind::PhotometricSuite: return run_photometric_suite(spec, ds);
    case ExperimentKind::RecognitionProbes: return run_recognition_probes(spec, ds);
    case ExperimentKind::ContextAndFlip: return run_context_and_flip(spec, ds);
  }
  throw ConfigError("unknown experiment kind");
}

}  // namespace depthprobe
