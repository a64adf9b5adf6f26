#include "depthprobe/serialization.hpp"

namespace depthprobe {

namespace {

// Missing keys keep their defaults so config files can be partial.
template <class T>
void read_opt(const Json& j, const char* key, T& out) {
  if (const auto it = j.find(key); it != j.end() && !it->is_null()) out = it->get<T>();
}

}  // namespace

void to_json(Json& j, const CenteredCoord& c) { j = Json::array({c.x, c.y}); }

void from_json(const Json& j, CenteredCoord& c) {
  if (j.is_array() && j.size() == 2) {
    c.x = j[0].get<double>();
    c.y = j[1].get<double>();
  } else {
    c.x = j.at("x").get<double>();
    c.y = j.at("y").get<double>();
  }
}

void to_json(Json& j, const CameraModel& c) {
  j = Json{{"f_px", c.f_px},
           {"cx_px", c.cx_px},
           {"cy_px", c.cy_px},
           {"cam_height_m", c.cam_height_m},
           {"baseline_m", c.baseline_m},
           {"image_w_px", c.image_w_px},
           {"image_h_px", c.image_h_px}};
}

void from_json(const Json& j, CameraModel& c) {
  const bool has_w = j.contains("image_w_px");
  const bool has_h = j.contains("image_h_px");
  read_opt(j, "f_px", c.f_px);
  read_opt(j, "cam_height_m", c.cam_height_m);
  read_opt(j, "baseline_m", c.baseline_m);
  read_opt(j, "image_w_px", c.image_w_px);
  read_opt(j, "image_h_px", c.image_h_px);
  // A resized frame without an explicit principal point is centered.
  if (has_w || has_h) c = c.with_frame(c.image_w_px, c.image_h_px);
  read_opt(j, "cx_px", c.cx_px);
  read_opt(j, "cy_px", c.cy_px);
}

void to_json(Json& j, const GroundPlaneModel& p) {
  j = Json{{"horizon_y", p.horizon_y}, {"camera", p.camera}, {"roll_deg", p.roll_deg}};
}

void from_json(const Json& j, GroundPlaneModel& p) {
  read_opt(j, "horizon_y", p.horizon_y);
  read_opt(j, "camera", p.camera);
  read_opt(j, "roll_deg", p.roll_deg);
}

void to_json(Json& j, const OracleObstacle& o) { j = Json{{"footprint", o.footprint}, {"depth_m", o.depth_m}}; }

void from_json(const Json& j, OracleObstacle& o) {
  o.footprint = j.at("footprint").get<std::vector<CenteredCoord>>();
  o.depth_m = j.at("depth_m").get<double>();
}

void to_json(Json& j, const OracleSpec& s) {
  j = Json{{"mode", std::string(to_string(s.mode))},
           {"plane", s.plane},
           {"obstacles", s.obstacles},
           {"prior_plane", s.prior_plane},
           {"noise_sd", s.noise_sd}};
}

void from_json(const Json& j, OracleSpec& s) {
  if (const auto it = j.find("mode"); it != j.end()) s.mode = parse_oracle_mode(it->get<std::string>());
  read_opt(j, "plane", s.plane);
  read_opt(j, "obstacles", s.obstacles);
  s.prior_plane = s.plane;
  read_opt(j, "prior_plane", s.prior_plane);
  read_opt(j, "noise_sd", s.noise_sd);
}

void to_json(Json& j, const FracRect& r) { j = Json::array({r.x0, r.y0, r.x1, r.y1}); }

void from_json(const Json& j, FracRect& r) {
  if (!j.is_array() || j.size() != 4) throw ConfigError("fractional rectangle must be [x0, y0, x1, y1]");
  r = {j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
}

void to_json(Json& j, const MetricSet& m) {
  j = Json{{"abs_rel", m.abs_rel},   {"sq_rel", m.sq_rel}, {"rmse", m.rmse_m},     {"rmse_log", m.rmse_log},
           {"d1_all", m.d1_all_pct}, {"delta1", m.delta1}, {"delta2", m.delta2}, {"delta3", m.delta3}};
}

void from_json(const Json& j, MetricSet& m) {
  m.abs_rel = j.at("abs_rel").get<double>();
  m.sq_rel = j.at("sq_rel").get<double>();
  m.rmse_m = j.at("rmse").get<double>();
  m.rmse_log = j.at("rmse_log").get<double>();
  m.d1_all_pct = j.at("d1_all").get<double>();
  m.delta1 = j.at("delta1").get<double>();
  m.delta2 = j.at("delta2").get<double>();
  m.delta3 = j.at("delta3").get<double>();
}

void to_json(Json& j, const RegressionSummary& r) {
  j = Json{{"slope", r.slope},
           {"intercept", r.intercept},
           {"pearson_r", r.pearson_r},
           {"n_points", r.n_points},
           {"n_outliers_removed", r.n_outliers_removed},
           {"outlier_threshold_sd", std::isfinite(r.outlier_threshold_sd) ? Json(r.outlier_threshold_sd)
                                                                          : Json("inf")}};
}

void from_json(const Json& j, RegressionSummary& r) {
  r.slope = j.at("slope").get<double>();
  r.intercept = j.at("intercept").get<double>();
  r.pearson_r = j.at("pearson_r").get<double>();
  r.n_points = j.at("n_points").get<std::size_t>();
  r.n_outliers_removed = j.at("n_outliers_removed").get<std::size_t>();
  const auto& t = j.at("outlier_threshold_sd");
  r.outlier_threshold_sd = t.is_string() ? std::numeric_limits<double>::infinity() : t.get<double>();
}

void to_json(Json& j, const RansacParams& p) {
  j = Json{{"iterations", p.iterations},
           {"inlier_tol", p.inlier_tol},
           {"min_inlier_frac", p.min_inlier_frac},
           {"seed", p.seed},
           {"max_samples", p.max_samples}};
}

void from_json(const Json& j, RansacParams& p) {
  read_opt(j, "iterations", p.iterations);
  read_opt(j, "inlier_tol", p.inlier_tol);
  read_opt(j, "min_inlier_frac", p.min_inlier_frac);
  read_opt(j, "seed", p.seed);
  read_opt(j, "max_samples", p.max_samples);
}

void to_json(Json& j, const HoughParams& p) {
  j = Json{{"angle_res_deg", p.angle_res_deg},
           {"angle_range_deg", p.angle_range_deg},
           {"rho_res_px", p.rho_res_px},
           {"min_pixels", p.min_pixels}};
}

void from_json(const Json& j, HoughParams& p) {
  read_opt(j, "angle_res_deg", p.angle_res_deg);
  read_opt(j, "angle_range_deg", p.angle_range_deg);
  read_opt(j, "rho_res_px", p.rho_res_px);
  read_opt(j, "min_pixels", p.min_pixels);
}

}  // namespace depthprobe
