#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

#include "depthprobe/dataset.hpp"
#include "depthprobe/imgsynth.hpp"
#include "depthprobe/metrics.hpp"
#include "depthprobe/modelio.hpp"
#include "depthprobe/robustfit.hpp"

namespace depthprobe {

enum class ExperimentKind {
  PositionVsScale,
  PitchHorizonNatural,
  PitchCrop,
  PitchVsObstacleDisparity,
  RollCrop,
  PhotometricSuite,
  RecognitionProbes,
  ContextAndFlip,
};

std::string_view to_string(ExperimentKind kind);
/// Accepts the enum name or its kebab-case form ("pitch-crop").
ExperimentKind parse_experiment_kind(std::string_view name);
const std::vector<ExperimentKind>& all_experiment_kinds();

enum class ProbeKind { Shape, Edges, Shadow };

std::string_view to_string(ProbeKind kind);
ProbeKind parse_probe_kind(std::string_view name);

/// One synthetic recognition probe.
struct ProbeSpec {
  std::string id;
  ProbeKind kind = ProbeKind::Shape;
  /// Images to probe; empty means every image.
  std::vector<std::string> image_ids;
  /// Shape: polygon in centered coordinates and its fill.
  std::vector<CenteredCoord> polygon;
  Rgb color{200, 40, 40};
  /// Edges and Shadow: cutout pasted at its original position.
  std::size_t cutout = 0;
  std::set<SpritePart> parts{SpritePart::Bottom, SpritePart::Left, SpritePart::Right, SpritePart::Top,
                             SpritePart::Interior};
  int band_px = 4;
  ShadowParams shadow{};
  bool with_shadow = false;
  /// Oracle endpoints see the probe as an obstacle only when set.
  bool register_obstacle = true;
};

/// Default probe set: registered and unregistered triangles, edge subsets
/// of the first cutout, and the same cutout with and without a shadow.
std::vector<ProbeSpec> default_probes(const Dataset& dataset);

struct ExperimentSpec {
  ExperimentKind kind = ExperimentKind::PitchCrop;
  ModelEndpoint endpoint{};
  std::uint64_t seed = 0;
  int workers = 1;

  std::vector<double> r_sweep;
  std::vector<PlacementMode> placement_modes{PlacementMode::PositionAndScale, PlacementMode::PositionOnly,
                                             PlacementMode::ScaleOnly};
  std::vector<int> crop_offsets{-30, -20, -10, 0, 10, 20, 30};
  double pitch_crop_h_frac = kPitchCropHeightFrac;
  double pitch_crop_w_frac = kPitchCropWidthFrac;
  std::vector<double> roll_angles{-3, -2, -1, 0, 1, 2, 3};
  double roll_crop_h_frac = kRollCropHeightFrac;
  double roll_crop_w_frac = kRollCropWidthFrac;
  std::vector<PhotometricMode> photometric_modes{PhotometricMode::Unmodified, PhotometricMode::Grayscale,
                                                 PhotometricMode::FalseColors, PhotometricMode::ClassAverageColors,
                                                 PhotometricMode::SemanticRgb};
  std::vector<ProbeSpec> probes;

  FracRect ground_region = kGroundRegion;
  RansacParams ransac{};
  int horizon_repeats = 5;
  DisparityBand band{};
  HoughParams hough{};
  double outlier_threshold_sd = 3.0;
  EvalConfig eval{};
  ComparisonThresholds comparison{};
  /// Re-run pitch and roll experiments against both oracles and report
  /// whether the endpoint's slope lies between them.
  bool bracket = true;

  ExperimentSpec();
  /// Throws ConfigError on empty or out-of-range parameters.
  void validate() const;
};

/// Reads a versioned JSON experiment document; missing keys keep defaults.
ExperimentSpec experiment_spec_from_json(const nlohmann::json& j);
nlohmann::json experiment_spec_to_json(const ExperimentSpec& spec);

enum class TrialStatus { Ok, ModelError, FitError, Skipped };

std::string_view to_string(TrialStatus status);
TrialStatus parse_trial_status(std::string_view name);

/// One manipulated image and what was measured on it. Unused fields stay
/// empty. `curve`, `x` and `y` place the trial on an aggregate curve.
struct TrialRecord {
  ExperimentKind kind = ExperimentKind::PitchCrop;
  std::string image_id;
  /// Trial family: cutout, obstacle or probe identity within the image.
  std::string family;
  std::optional<double> r;
  std::optional<std::string> placement_mode;
  std::optional<int> offset_px;
  std::optional<double> angle_deg;
  std::optional<std::string> photometric_mode;
  std::optional<std::string> probe_id;

  std::string curve;
  std::optional<double> x;
  std::optional<double> y;

  std::optional<double> region_mean_disparity;
  std::optional<double> horizon_y;
  std::optional<double> roll_deg;
  std::optional<double> detection_score;
  std::optional<double> implied_distance_m;
  std::optional<double> estimated_distance_m;
  std::optional<MetricSet> metrics;

  TrialStatus status = TrialStatus::Ok;
  std::string reason;
};

struct CurvePoint {
  double x = 0.0;
  double mean = 0.0;
  /// Sample SD; absent with fewer than two trials.
  std::optional<double> sd;
  std::size_t n = 0;
};

struct Curve {
  std::string name;
  std::string x_label;
  std::string y_label;
  std::vector<CurvePoint> points;
};

struct BracketCheck {
  double geometry_slope = 0.0;
  double prior_slope = 0.0;
  double endpoint_slope = 0.0;
  bool within = false;
};

struct ExperimentReport {
  ExperimentKind kind = ExperimentKind::PitchCrop;
  nlohmann::json spec_echo;
  nlohmann::json provenance;
  std::vector<TrialRecord> trials;
  std::vector<Curve> curves;
  /// With and without outlier rejection.
  std::optional<RegressionSummary> regression;
  std::optional<RegressionSummary> regression_raw;
  std::optional<BracketCheck> bracket;
  std::vector<std::pair<std::string, MetricSet>> metric_rows;
  std::vector<std::string> skipped_conditions;
  std::optional<MetricComparison> comparison;
  /// Side-by-side image and disparity panels, keyed by file stem.
  std::vector<std::pair<std::string, ImageBuffer>> panels;
};

/// Aggregates trials into curves, regressions and metric rows. Pure: the
/// same trials always give the same summary.
void summarize(ExperimentReport& report, double outlier_threshold_sd = 3.0,
               const ComparisonThresholds& thresholds = {});

ExperimentReport run_position_vs_scale(const ExperimentSpec& spec, const Dataset& dataset);
ExperimentReport run_pitch_crop(const ExperimentSpec& spec, const Dataset& dataset);
ExperimentReport run_pitch_horizon_natural(const ExperimentSpec& spec, const Dataset& dataset);
ExperimentReport run_pitch_vs_obstacle_disparity(const ExperimentSpec& spec, const Dataset& dataset);
ExperimentReport run_roll_crop(const ExperimentSpec& spec, const Dataset& dataset);
ExperimentReport run_photometric_suite(const ExperimentSpec& spec, const Dataset& dataset);
ExperimentReport run_recognition_probes(const ExperimentSpec& spec, const Dataset& dataset);
ExperimentReport run_context_and_flip(const ExperimentSpec& spec, const Dataset& dataset);

ExperimentReport run_experiment(const ExperimentSpec& spec, const Dataset& dataset);

/// Writes report.json, trials.csv, metrics.csv when metric rows exist, one
/// SVG per curve and any panels under panels/. Returns the files written.
std::vector<std::filesystem::path> emit_report(const ExperimentReport& report, const std::filesystem::path& out_dir);

std::string trials_csv(const std::vector<TrialRecord>& trials);
std::vector<TrialRecord> parse_trials_csv(const std::string& text);
nlohmann::json report_json(const ExperimentReport& report);
std::string curve_svg(const Curve& curve);

/// Rebuilds a report from an earlier run's trials.csv (and report.json for
/// the spec echo, when present). A non-positive threshold takes the value
/// recorded in the spec echo, else 3.
ExperimentReport reload_report(const std::filesystem::path& dir, double outlier_threshold_sd = 0.0);

/// Grayscale rendering of a disparity map, scaled to its maximum.
ImageBuffer colorize_disparity(const DisparityMap& map);

}  // namespace depthprobe
