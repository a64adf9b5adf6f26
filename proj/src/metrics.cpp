#include "depthprobe/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace depthprobe {

void EvalConfig::validate() const {
  if (!(min_depth_m > 0.0 && min_depth_m < depth_cap_m)) {
    throw ConfigError("evaluation needs 0 < min_depth_m < depth_cap_m");
  }
}

MetricSet compute_metrics(const DisparityMap& pred, const DisparityMap& gt, const CameraModel& camera,
                          const EvalConfig& cfg) {
  cfg.validate();
  if (pred.width() != gt.width() || pred.height() != gt.height()) {
    throw DomainError("prediction and ground truth differ in size");
  }
  const Rect crop = cfg.eval_crop.resolve(gt.width(), gt.height());
  const double fb = camera.f_px * camera.baseline_m;
  const double width = camera.image_w_px;

  double abs_rel = 0.0, sq_rel = 0.0, sq = 0.0, sq_log = 0.0;
  std::size_t n = 0, d1 = 0, a1 = 0, a2 = 0, a3 = 0;
  for (int r = crop.row; r < crop.bottom(); ++r) {
    for (int c = crop.col; c < crop.right(); ++c) {
      if (!gt.is_valid(c, r)) continue;
      const double g = gt.at(c, r);
      double gt_depth, gt_disp_px;
      if (cfg.gt_kind == GroundTruthKind::DepthMeters) {
        if (!(g > 0.0)) continue;
        gt_depth = g;
        gt_disp_px = fb / g;
      } else {
        if (!(g > 0.0)) continue;
        gt_disp_px = g * width;
        gt_depth = fb / gt_disp_px;
      }
      if (gt_depth < cfg.min_depth_m || gt_depth > cfg.depth_cap_m) continue;

      const double d = pred.is_valid(c, r) ? pred.at(c, r) : 0.0;
      const double pred_disp_px = d > 0.0 ? d * width : 0.0;
      const double raw = pred_disp_px > 0.0 ? fb / pred_disp_px : std::numeric_limits<double>::infinity();
      const double z = std::clamp(raw, cfg.min_depth_m, cfg.depth_cap_m);

      const double diff = z - gt_depth;
      abs_rel += std::abs(diff) / gt_depth;
      sq_rel += diff * diff / gt_depth;
      sq += diff * diff;
      const double dl = std::log(z) - std::log(gt_depth);
      sq_log += dl * dl;
      const double ratio = std::max(z / gt_depth, gt_depth / z);
      if (ratio < 1.25) ++a1;
      if (ratio < 1.25 * 1.25) ++a2;
      if (ratio < 1.25 * 1.25 * 1.25) ++a3;
      const double err_px = std::abs(pred_disp_px - gt_disp_px);
      if (err_px >= 3.0 && err_px >= 0.05 * gt_disp_px) ++d1;
      ++n;
    }
  }
  if (n == 0) throw EvaluationError("no valid ground-truth pixels inside the evaluation crop");
  const double nn = static_cast<double>(n);
  MetricSet m;
  m.abs_rel = abs_rel / nn;
  m.sq_rel = sq_rel / nn;
  m.rmse_m = std::sqrt(sq / nn);
  m.rmse_log = std::sqrt(sq_log / nn);
  m.d1_all_pct = 100.0 * static_cast<double>(d1) / nn;
  m.delta1 = static_cast<double>(a1) / nn;
  m.delta2 = static_cast<double>(a2) / nn;
  m.delta3 = static_cast<double>(a3) / nn;
  return m;
}

MetricSet mean_metrics(const std::vector<MetricSet>& sets) {
  if (sets.empty()) throw EvaluationError("no metric sets to average");
  MetricSet m;
  for (const auto& s : sets) {
    m.abs_rel += s.abs_rel;
    m.sq_rel += s.sq_rel;
    m.rmse_m += s.rmse_m;
    m.rmse_log += s.rmse_log;
    m.d1_all_pct += s.d1_all_pct;
    m.delta1 += s.delta1;
    m.delta2 += s.delta2;
    m.delta3 += s.delta3;
  }
  const double n = static_cast<double>(sets.size());
  m.abs_rel /= n;
  m.sq_rel /= n;
  m.rmse_m /= n;
  m.rmse_log /= n;
  m.d1_all_pct /= n;
  m.delta1 /= n;
  m.delta2 /= n;
  m.delta3 /= n;
  return m;
}

const std::vector<std::string>& metric_names() {
  static const std::vector<std::string> names = {"abs_rel", "sq_rel", "rmse",   "rmse_log",
                                                 "d1_all",  "delta1", "delta2", "delta3"};
  return names;
}

double metric_value(const MetricSet& m, const std::string& name) {
  if (name == "abs_rel") return m.abs_rel;
  if (name == "sq_rel") return m.sq_rel;
  if (name == "rmse") return m.rmse_m;
  if (name == "rmse_log") return m.rmse_log;
  if (name == "d1_all") return m.d1_all_pct;
  if (name == "delta1") return m.delta1;
  if (name == "delta2") return m.delta2;
  if (name == "delta3") return m.delta3;
  throw ConfigError("unknown metric '" + name + "'");
}

bool higher_is_better(const std::string& name) { return name.rfind("delta", 0) == 0; }

namespace {

MetricSet subtract(const MetricSet& a, const MetricSet& b) {
  return {a.abs_rel - b.abs_rel,   a.sq_rel - b.sq_rel, a.rmse_m - b.rmse_m, a.rmse_log - b.rmse_log,
          a.d1_all_pct - b.d1_all_pct, a.delta1 - b.delta1, a.delta2 - b.delta2, a.delta3 - b.delta3};
}

}  // namespace

MetricComparison compare_metric_rows(const std::map<std::string, MetricSet>& rows,
                                     const ComparisonThresholds& thresholds) {
  if (rows.size() < 2) throw ConfigError("comparison needs at least two rows");
  const auto base_it = rows.find(kBaselineCondition);
  if (base_it == rows.end()) throw ConfigError("comparison needs an \"Unmodified\" row");
  const MetricSet& base = base_it->second;

  MetricComparison out;
  for (const auto& [name, m] : rows) {
    if (name == kBaselineCondition) continue;
    out.deltas[name] = subtract(m, base);
    if (out.deltas[name].abs_rel >= thresholds.degraded_abs_rel) out.flags.push_back("degraded:" + name);
  }
  for (const auto& metric : metric_names()) {
    std::vector<std::string> order;
    for (const auto& [name, m] : rows) order.push_back(name);
    const bool up = higher_is_better(metric);
    std::stable_sort(order.begin(), order.end(), [&](const std::string& a, const std::string& b) {
      const double va = metric_value(rows.at(a), metric);
      const double vb = metric_value(rows.at(b), metric);
      return up ? va > vb : va < vb;
    });
    out.rankings[metric] = std::move(order);
  }

  auto delta_of = [&](const char* name) -> const MetricSet* {
    const auto it = out.deltas.find(name);
    return it == out.deltas.end() ? nullptr : &it->second;
  };
  const MetricSet* gray = delta_of("Grayscale");
  const MetricSet* false_colors = delta_of("FalseColors");
  const MetricSet* semantic = delta_of("SemanticRgb");
  const MetricSet* class_avg = delta_of("ClassAverageColors");
  if (gray && false_colors && semantic && class_avg) {
    const bool near = std::abs(gray->abs_rel) <= thresholds.near_abs_rel &&
                      std::abs(false_colors->abs_rel) <= thresholds.near_abs_rel;
    const bool degraded = semantic->abs_rel >= thresholds.degraded_abs_rel &&
                          class_avg->abs_rel >= thresholds.degraded_abs_rel;
    out.value_channel_pattern = near && degraded;
    if (out.value_channel_pattern) out.flags.push_back("pattern:value-preserving-near-baseline");
  }
  return out;
}

std::string metric_rows_csv(const std::vector<std::pair<std::string, MetricSet>>& rows) {
  std::string out = "condition,abs_rel,sq_rel,rmse,rmse_log,d1_all,delta1,delta2,delta3\n";
  char buf[64];
  for (const auto& [name, m] : rows) {
    out += name;
    for (const auto& metric : metric_names()) {
      std::snprintf(buf, sizeof buf, ",%.17g", metric_value(m, metric));
      out += buf;
    }
    out += '\n';
  }
  return out;
}

}  // namespace depthprobe
