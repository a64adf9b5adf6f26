#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "depthprobe/png_io.hpp"
#include "depthprobe/runner.hpp"
#include "depthprobe/serialization.hpp"

namespace depthprobe {

namespace fs = std::filesystem;

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_short(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false, any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"' && i + 1 < text.size() && text[i + 1] == '"') {
        field += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        field += c;
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
      any = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
      any = true;
    } else if (c == '\n') {
      row.push_back(std::move(field));
      field.clear();
      rows.push_back(std::move(row));
      row.clear();
      any = false;
    } else if (c != '\r') {
      field += c;
      any = true;
    }
  }
  if (any) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> cols = [] {
    std::vector<std::string> c{"kind",        "image_id",  "family",           "r",
                               "placement_mode", "offset_px", "angle_deg",     "photometric_mode",
                               "probe_id",    "curve",     "x",                "y",
                               "region_mean_disparity", "horizon_y", "roll_deg", "detection_score",
                               "implied_distance_m", "estimated_distance_m"};
    for (const auto& m : metric_names()) c.push_back(m);
    c.push_back("status");
    c.push_back("reason");
    return c;
  }();
  return cols;
}

std::string opt_num(const std::optional<double>& v) { return v ? fmt17(*v) : std::string{}; }

std::pair<std::string, std::string> axis_labels(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::PositionVsScale: return {"relative distance r", "estimated relative distance"};
    case ExperimentKind::PitchCrop: return {"true horizon shift (px)", "estimated horizon shift (px)"};
    case ExperimentKind::PitchHorizonNatural: return {"true horizon (px)", "estimated horizon (px)"};
    case ExperimentKind::PitchVsObstacleDisparity: return {"crop offset (px)", "relative obstacle disparity"};
    case ExperimentKind::RollCrop: return {"true roll (deg)", "estimated roll (deg)"};
    case ExperimentKind::ContextAndFlip: return {"0 reference, 1 manipulated", "relative disparity"};
    default: return {"x", "y"};
  }
}

bool has_regression(ExperimentKind kind) {
  return kind == ExperimentKind::PitchCrop || kind == ExperimentKind::PitchHorizonNatural ||
         kind == ExperimentKind::RollCrop;
}

Json metric_comparison_json(const MetricComparison& c) {
  Json deltas = Json::object();
  for (const auto& [k, v] : c.deltas) deltas[k] = v;
  return Json{{"deltas", deltas},
              {"rankings", c.rankings},
              {"flags", c.flags},
              {"value_channel_pattern", c.value_channel_pattern}};
}

std::string sanitize(const std::string& s) {
  std::string out;
  for (char c : s) out += std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' ? c : '_';
  return out;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path.string(), "cannot open for writing");
  out << text;
  if (!out) throw IoError(path.string(), "write failed");
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path.string(), "cannot open");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

void summarize(ExperimentReport& report, double outlier_threshold_sd, const ComparisonThresholds& thresholds) {
  report.curves.clear();
  report.regression.reset();
  report.regression_raw.reset();
  report.metric_rows.clear();
  report.skipped_conditions.clear();
  report.comparison.reset();

  std::map<std::string, std::map<double, std::vector<double>>> bins;
  std::vector<DataPoint> points;
  for (const auto& t : report.trials) {
    if (t.status != TrialStatus::Ok || !t.x || !t.y) continue;
    points.push_back({*t.x, *t.y});
    if (!t.curve.empty()) bins[t.curve][*t.x].push_back(*t.y);
  }
  const auto [xl, yl] = axis_labels(report.kind);
  for (const auto& [name, by_x] : bins) {
    Curve curve{name, xl, yl, {}};
    for (const auto& [x, ys] : by_x) {
      CurvePoint p;
      p.x = x;
      p.n = ys.size();
      double sum = 0.0;
      for (double y : ys) sum += y;
      p.mean = sum / static_cast<double>(p.n);
      if (p.n >= 2) {
        double ss = 0.0;
        for (double y : ys) ss += (y - p.mean) * (y - p.mean);
        p.sd = std::sqrt(ss / static_cast<double>(p.n - 1));
      }
      curve.points.push_back(p);
    }
    report.curves.push_back(std::move(curve));
  }

  if (has_regression(report.kind)) {
    report.regression = regress_with_outlier_rejection(points, outlier_threshold_sd);
    report.regression_raw = regress_with_outlier_rejection(points, std::numeric_limits<double>::infinity());
  }

  if (report.kind == ExperimentKind::PhotometricSuite) {
    std::vector<std::string> order;
    std::map<std::string, std::vector<MetricSet>> sets;
    for (const auto& t : report.trials) {
      if (!t.photometric_mode) continue;
      if (std::find(order.begin(), order.end(), *t.photometric_mode) == order.end()) order.push_back(*t.photometric_mode);
      if (t.status == TrialStatus::Ok && t.metrics) sets[*t.photometric_mode].push_back(*t.metrics);
    }
    std::map<std::string, MetricSet> rows;
    for (const auto& cond : order) {
      const auto it = sets.find(cond);
      if (it == sets.end()) {
        report.skipped_conditions.push_back(cond);
        continue;
      }
      const MetricSet m = mean_metrics(it->second);
      report.metric_rows.emplace_back(cond, m);
      rows[cond] = m;
    }
    if (rows.size() >= 2 && rows.count(kBaselineCondition)) report.comparison = compare_metric_rows(rows, thresholds);
  }
}

std::string trials_csv(const std::vector<TrialRecord>& trials) {
  std::string out;
  const auto& cols = csv_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) out += (i ? "," : "") + cols[i];
  out += '\n';
  for (const auto& t : trials) {
    std::vector<std::string> f{std::string(to_string(t.kind)),
                               t.image_id,
                               t.family,
                               opt_num(t.r),
                               t.placement_mode.value_or(""),
                               t.offset_px ? std::to_string(*t.offset_px) : "",
                               opt_num(t.angle_deg),
                               t.photometric_mode.value_or(""),
                               t.probe_id.value_or(""),
                               t.curve,
                               opt_num(t.x),
                               opt_num(t.y),
                               opt_num(t.region_mean_disparity),
                               opt_num(t.horizon_y),
                               opt_num(t.roll_deg),
                               opt_num(t.detection_score),
                               opt_num(t.implied_distance_m),
                               opt_num(t.estimated_distance_m)};
    for (const auto& m : metric_names()) f.push_back(t.metrics ? fmt17(metric_value(*t.metrics, m)) : "");
    f.push_back(std::string(to_string(t.status)));
    f.push_back(t.reason);
    for (std::size_t i = 0; i < f.size(); ++i) out += (i ? "," : "") + csv_field(f[i]);
    out += '\n';
  }
  return out;
}

std::vector<TrialRecord> parse_trials_csv(const std::string& text) {
  const auto rows = parse_csv(text);
  if (rows.empty()) throw ConfigError("trials.csv is empty");
  std::map<std::string, std::size_t> idx;
  for (std::size_t i = 0; i < rows[0].size(); ++i) idx[rows[0][i]] = i;
  for (const auto& c : csv_columns()) {
    if (!idx.count(c)) throw ConfigError("trials.csv lacks column '" + c + "'");
  }
  std::vector<TrialRecord> out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() != rows[0].size()) {
      throw ConfigError("trials.csv row " + std::to_string(r + 1) + " has " + std::to_string(row.size()) + " fields");
    }
    auto s = [&](const char* c) -> const std::string& { return row[idx.at(c)]; };
    auto num = [&](const char* c) -> std::optional<double> {
      const auto& v = s(c);
      if (v.empty()) return std::nullopt;
      return std::stod(v);
    };
    auto str = [&](const char* c) -> std::optional<std::string> {
      if (s(c).empty()) return std::nullopt;
      return s(c);
    };
    TrialRecord t;
    t.kind = parse_experiment_kind(s("kind"));
    t.image_id = s("image_id");
    t.family = s("family");
    t.r = num("r");
    t.placement_mode = str("placement_mode");
    if (!s("offset_px").empty()) t.offset_px = std::stoi(s("offset_px"));
    t.angle_deg = num("angle_deg");
    t.photometric_mode = str("photometric_mode");
    t.probe_id = str("probe_id");
    t.curve = s("curve");
    t.x = num("x");
    t.y = num("y");
    t.region_mean_disparity = num("region_mean_disparity");
    t.horizon_y = num("horizon_y");
    t.roll_deg = num("roll_deg");
    t.detection_score = num("detection_score");
    t.implied_distance_m = num("implied_distance_m");
    t.estimated_distance_m = num("estimated_distance_m");
    if (!s("abs_rel").empty()) {
      MetricSet m;
      m.abs_rel = *num("abs_rel");
      m.sq_rel = *num("sq_rel");
      m.rmse_m = *num("rmse");
      m.rmse_log = *num("rmse_log");
      m.d1_all_pct = *num("d1_all");
      m.delta1 = *num("delta1");
      m.delta2 = *num("delta2");
      m.delta3 = *num("delta3");
      t.metrics = m;
    }
    t.status = parse_trial_status(s("status"));
    t.reason = s("reason");
    out.push_back(std::move(t));
  }
  return out;
}

Json report_json(const ExperimentReport& report) {
  std::map<std::string, std::size_t> counts;
  for (const auto& t : report.trials) ++counts[std::string(to_string(t.status))];
  Json curves = Json::array();
  for (const auto& c : report.curves) {
    Json pts = Json::array();
    for (const auto& p : c.points) {
      pts.push_back({{"x", p.x}, {"mean", p.mean}, {"sd", p.sd ? Json(*p.sd) : Json(nullptr)}, {"n", p.n}});
    }
    curves.push_back({{"name", c.name}, {"x_label", c.x_label}, {"y_label", c.y_label}, {"points", pts}});
  }
  Json rows = Json::array();
  for (const auto& [cond, m] : report.metric_rows) rows.push_back({{"condition", cond}, {"metrics", m}});
  Json bracket = nullptr;
  if (report.bracket) {
    bracket = {{"geometry_slope", report.bracket->geometry_slope},
               {"prior_slope", report.bracket->prior_slope},
               {"endpoint_slope", report.bracket->endpoint_slope},
               {"within", report.bracket->within}};
  }
  return Json{{"kind", std::string(to_string(report.kind))},
              {"spec", report.spec_echo},
              {"provenance", report.provenance},
              {"n_trials", report.trials.size()},
              {"status_counts", counts},
              {"curves", curves},
              {"regression", report.regression ? Json(*report.regression) : Json(nullptr)},
              {"regression_without_rejection", report.regression_raw ? Json(*report.regression_raw) : Json(nullptr)},
              {"bracket", bracket},
              {"metric_rows", rows},
              {"skipped_conditions", report.skipped_conditions},
              {"comparison", report.comparison ? metric_comparison_json(*report.comparison) : Json(nullptr)},
              {"panels", [&] {
                 Json p = Json::array();
                 for (const auto& [stem, img] : report.panels) p.push_back("panels/" + stem + ".png");
                 return p;
               }()}};
}

std::string curve_svg(const Curve& curve) {
  constexpr double W = 640, H = 420, L = 70, R = 20, T = 40, B = 60;
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& p : curve.points) {
    const double sd = p.sd.value_or(0.0);
    x0 = std::min(x0, p.x);
    x1 = std::max(x1, p.x);
    y0 = std::min(y0, p.mean - sd);
    y1 = std::max(y1, p.mean + sd);
  }
  if (curve.points.empty()) x0 = y0 = 0.0, x1 = y1 = 1.0;
  if (x1 - x0 < 1e-12) x0 -= 0.5, x1 += 0.5;
  if (y1 - y0 < 1e-12) y0 -= 0.5, y1 += 0.5;
  const double pad = 0.05 * (y1 - y0);
  y0 -= pad;
  y1 += pad;
  auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
  auto py = [&](double y) { return H - B - (y - y0) / (y1 - y0) * (H - T - B); };

  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
    << ' ' << H << "\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">"
    << curve.name << "</text>\n";
  s << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B
    << "\" stroke=\"black\"/>\n";
  s << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double xv = x0 + (x1 - x0) * k / 4.0, yv = y0 + (y1 - y0) * k / 4.0;
    s << "<text x=\"" << fmt_short(px(xv)) << "\" y=\"" << H - B + 18
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << fmt_short(xv) << "</text>\n";
    s << "<text x=\"" << L - 6 << "\" y=\"" << fmt_short(py(yv) + 4)
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << fmt_short(yv) << "</text>\n";
  }
  s << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 16
    << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" << curve.x_label << "</text>\n";
  s << "<text transform=\"translate(16," << (T + H - B) / 2
    << ") rotate(-90)\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" << curve.y_label
    << "</text>\n";

  if (!curve.points.empty()) {
    s << "<polygon fill=\"#4a7ab5\" fill-opacity=\"0.25\" stroke=\"none\" points=\"";
    for (const auto& p : curve.points) s << fmt_short(px(p.x)) << ',' << fmt_short(py(p.mean + p.sd.value_or(0.0))) << ' ';
    for (auto it = curve.points.rbegin(); it != curve.points.rend(); ++it) {
      s << fmt_short(px(it->x)) << ',' << fmt_short(py(it->mean - it->sd.value_or(0.0))) << ' ';
    }
    s << "\"/>\n<polyline fill=\"none\" stroke=\"#1f4e8c\" stroke-width=\"2\" points=\"";
    for (const auto& p : curve.points) s << fmt_short(px(p.x)) << ',' << fmt_short(py(p.mean)) << ' ';
    s << "\"/>\n";
  }
  s << "</svg>\n";
  return s.str();
}

std::vector<fs::path> emit_report(const ExperimentReport& report, const fs::path& out_dir) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (!fs::is_directory(out_dir)) throw IoError(out_dir.string(), "cannot create output directory");
  std::vector<fs::path> files;
  auto put = [&](const fs::path& p, const std::string& text) {
    write_text(p, text);
    files.push_back(p);
  };
  put(out_dir / "report.json", report_json(report).dump(2) + "\n");
  put(out_dir / "trials.csv", trials_csv(report.trials));
  if (!report.metric_rows.empty()) put(out_dir / "metrics.csv", metric_rows_csv(report.metric_rows));
  for (const auto& c : report.curves) put(out_dir / ("curve_" + sanitize(c.name) + ".svg"), curve_svg(c));
  if (!report.panels.empty()) {
    fs::create_directories(out_dir / "panels");
    for (const auto& [stem, img] : report.panels) {
      const fs::path p = out_dir / "panels" / (sanitize(stem) + ".png");
      write_png_rgb(p, img);
      files.push_back(p);
    }
  }
  return files;
}

ExperimentReport reload_report(const fs::path& dir, double outlier_threshold_sd) {
  ExperimentReport rep;
  rep.trials = parse_trials_csv(read_text(dir / "trials.csv"));
  ComparisonThresholds thresholds;
  if (fs::exists(dir / "report.json")) {
    const Json j = Json::parse(read_text(dir / "report.json"));
    rep.kind = parse_experiment_kind(j.at("kind").get<std::string>());
    rep.spec_echo = j.value("spec", Json());
    rep.provenance = j.value("provenance", Json());
    if (rep.spec_echo.is_object()) {
      const ExperimentSpec spec = experiment_spec_from_json(rep.spec_echo);
      thresholds = spec.comparison;
      if (outlier_threshold_sd <= 0.0) outlier_threshold_sd = spec.outlier_threshold_sd;
    }
    if (j.contains("bracket") && j.at("bracket").is_object()) {
      const auto& b = j.at("bracket");
      rep.bracket = BracketCheck{b.at("geometry_slope").get<double>(), b.at("prior_slope").get<double>(),
                                 b.at("endpoint_slope").get<double>(), b.at("within").get<bool>()};
    }
  } else if (!rep.trials.empty()) {
    rep.kind = rep.trials.front().kind;
  } else {
    throw ConfigError(dir.string() + ": no trials and no report.json");
  }
  if (outlier_threshold_sd <= 0.0) outlier_threshold_sd = 3.0;
  summarize(rep, outlier_threshold_sd, thresholds);
  return rep;
}

}  // namespace depthprobe
