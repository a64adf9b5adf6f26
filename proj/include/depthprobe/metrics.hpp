#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "depthprobe/disparity.hpp"
#include "depthprobe/geometry.hpp"

namespace depthprobe {

/// Standard monocular depth evaluation measures.
struct MetricSet {
  double abs_rel = 0.0;
  double sq_rel = 0.0;
  double rmse_m = 0.0;
  double rmse_log = 0.0;
  double d1_all_pct = 0.0;
  double delta1 = 0.0;
  double delta2 = 0.0;
  double delta3 = 0.0;

  friend bool operator==(const MetricSet&, const MetricSet&) = default;
};

enum class GroundTruthKind { DepthMeters, NormalizedDisparity };

struct EvalConfig {
  double depth_cap_m = 80.0;
  double min_depth_m = 1e-3;
  FracRect eval_crop{};
  GroundTruthKind gt_kind = GroundTruthKind::NormalizedDisparity;

  void validate() const;
};

/// Compares a predicted disparity map against ground truth.
///
/// Depths come from z = f B / (d W) and are clamped to [min_depth_m,
/// depth_cap_m]; ground-truth pixels outside that range, outside the crop or
/// flagged invalid are ignored. Invalid predicted pixels count as zero
/// disparity. D1-all counts pixels whose disparity error in pixels is at
/// least 3 px and at least 5% of the true disparity.
MetricSet compute_metrics(const DisparityMap& pred, const DisparityMap& gt, const CameraModel& camera,
                          const EvalConfig& cfg = {});

/// Element-wise mean, used to average per-image results over a dataset.
MetricSet mean_metrics(const std::vector<MetricSet>& sets);

/// Metric names in report column order.
const std::vector<std::string>& metric_names();
double metric_value(const MetricSet& m, const std::string& name);
/// True for the delta accuracies, false for error measures.
bool higher_is_better(const std::string& name);

inline constexpr const char* kBaselineCondition = "Unmodified";

struct ComparisonThresholds {
  /// Value-preserving conditions count as "near baseline" within this Abs Rel delta.
  double near_abs_rel = 0.01;
  /// A condition is flagged degraded at or above this Abs Rel delta.
  double degraded_abs_rel = 0.05;
};

struct MetricComparison {
  /// Row minus baseline, per condition (baseline excluded).
  std::map<std::string, MetricSet> deltas;
  /// Per metric, condition names from best to worst.
  std::map<std::string, std::vector<std::string>> rankings;
  /// Raised observations, e.g. "degraded:SemanticRgb".
  std::vector<std::string> flags;
  /// Grayscale and FalseColors stay near the baseline while both flat-color
  /// conditions degrade.
  bool value_channel_pattern = false;
};

/// Throws ConfigError without an "Unmodified" row or with fewer than two rows.
MetricComparison compare_metric_rows(const std::map<std::string, MetricSet>& rows,
                                     const ComparisonThresholds& thresholds = {});

/// CSV with columns condition, abs_rel, sq_rel, rmse, rmse_log, d1_all,
/// delta1, delta2, delta3; rows in the given order.
std::string metric_rows_csv(const std::vector<std::pair<std::string, MetricSet>>& rows);

}  // namespace depthprobe
