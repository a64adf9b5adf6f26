#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "depthprobe/runner.hpp"
#include "depthprobe/synthetic.hpp"
#include "oracles.hpp"

using namespace depthprobe;
namespace fs = std::filesystem;

namespace {

const Dataset& tiny() {
  static const Dataset d = [] {
    SyntheticParams p;
    p.n_scenes = 4;
    p.seed = 21;
    return make_synthetic_dataset(p);
  }();
  return d;
}

ExperimentSpec spec_for(ExperimentKind kind, const std::string& endpoint = "oracle:geometry") {
  ExperimentSpec s;
  s.kind = kind;
  s.endpoint = ModelEndpoint::parse(endpoint);
  s.bracket = false;
  return s;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(ExperimentSpec, JsonRoundTrip) {
  ExperimentSpec s = spec_for(ExperimentKind::RollCrop, "oracle:prior");
  s.seed = 9;
  s.roll_angles = {-1, 0, 2.5};
  s.ransac.iterations = 50;
  s.outlier_threshold_sd = 2.5;
  const nlohmann::json j = experiment_spec_to_json(s);
  const ExperimentSpec back = experiment_spec_from_json(j);
  EXPECT_EQ(experiment_spec_to_json(back), j);
  EXPECT_EQ(back.roll_angles, s.roll_angles);
  EXPECT_EQ(back.endpoint.oracle_mode, OracleMode::FixedPrior);
}

TEST(ExperimentSpec, RejectsBadDocuments) {
  EXPECT_THROW(experiment_spec_from_json(nlohmann::json::parse(R"({"frobnicate": 1})")), ConfigError);
  EXPECT_THROW(experiment_spec_from_json(nlohmann::json::parse(R"({"schema_version": 99})")), ConfigError);
  EXPECT_THROW(experiment_spec_from_json(nlohmann::json::parse("[1]")), ConfigError);
  ExperimentSpec s = spec_for(ExperimentKind::PositionVsScale);
  s.r_sweep.clear();
  EXPECT_THROW(s.validate(), ConfigError);
  s = spec_for(ExperimentKind::PitchCrop);
  s.crop_offsets = {10, 20};
  EXPECT_THROW(s.validate(), ConfigError);
  s.crop_offsets = {0};
  EXPECT_NO_THROW(s.validate());
}

TEST(ExperimentSpec, SingleOffsetCannotBeRegressed) {
  ExperimentSpec s = spec_for(ExperimentKind::PitchCrop);
  s.crop_offsets = {0};
  EXPECT_THROW(run_experiment(s, tiny()), StatisticsError);
}

TEST(ExperimentKindNames, ParseBothForms) {
  for (ExperimentKind k : all_experiment_kinds()) EXPECT_EQ(parse_experiment_kind(to_string(k)), k);
  EXPECT_EQ(parse_experiment_kind("pitch-crop"), ExperimentKind::PitchCrop);
  EXPECT_EQ(parse_experiment_kind("position-vs-scale"), ExperimentKind::PositionVsScale);
  EXPECT_THROW(parse_experiment_kind("yaw"), ConfigError);
}

TEST(Runner, PitchCropSummaryMatchesRecomputationFromCsv) {
  oracle::TempDir tmp;
  const ExperimentReport rep = run_experiment(spec_for(ExperimentKind::PitchCrop), tiny());
  ASSERT_TRUE(rep.regression);
  EXPECT_NEAR(rep.regression->slope, 1.0, 0.05);
  emit_report(rep, tmp.path());

  // Independent recomputation from the CSV file.
  const auto trials = parse_trials_csv(slurp(tmp.path() / "trials.csv"));
  std::vector<DataPoint> pts;
  for (const auto& t : trials)
    if (t.status == TrialStatus::Ok && t.x && t.y) pts.push_back({*t.x, *t.y});
  const RegressionSummary raw = regress_with_outlier_rejection(pts, std::numeric_limits<double>::infinity());
  EXPECT_NEAR(raw.slope, rep.regression_raw->slope, 1e-12);
  EXPECT_NEAR(raw.pearson_r, rep.regression_raw->pearson_r, 1e-12);

  const ExperimentReport back = reload_report(tmp.path());
  EXPECT_NEAR(back.regression->slope, rep.regression->slope, 1e-12);
  EXPECT_EQ(trials_csv(back.trials), slurp(tmp.path() / "trials.csv"));
}

TEST(Runner, SameSeedSameTrials) {
  ExperimentSpec s = spec_for(ExperimentKind::RollCrop);
  s.roll_angles = {-2, 0, 2};
  const std::string a = trials_csv(run_experiment(s, tiny()).trials);
  s.workers = 3;
  EXPECT_EQ(trials_csv(run_experiment(s, tiny()).trials), a);
}

TEST(Runner, EmitWritesExpectedFiles) {
  oracle::TempDir tmp;
  ExperimentSpec s = spec_for(ExperimentKind::PositionVsScale);
  s.r_sweep = {1.0, 2.0};
  const ExperimentReport rep = run_experiment(s, tiny());
  const auto files = emit_report(rep, tmp.path());
  EXPECT_TRUE(fs::exists(tmp.path() / "report.json"));
  EXPECT_TRUE(fs::exists(tmp.path() / "trials.csv"));
  std::size_t svgs = 0;
  for (const auto& f : files) svgs += f.extension() == ".svg";
  EXPECT_EQ(svgs, rep.curves.size());
  EXPECT_EQ(rep.curves.size(), 3u);
  const auto j = nlohmann::json::parse(slurp(tmp.path() / "report.json"));
  EXPECT_EQ(j.at("kind"), "PositionVsScale");
}

TEST(Runner, PhotometricRowsIdenticalForGeometryOracle) {
  const ExperimentReport rep = run_experiment(spec_for(ExperimentKind::PhotometricSuite), tiny());
  ASSERT_GE(rep.metric_rows.size(), 2u);
  const MetricSet& base = rep.metric_rows.front().second;
  for (const auto& [name, m] : rep.metric_rows) {
    for (const auto& metric : metric_names()) EXPECT_NEAR(metric_value(m, metric), metric_value(base, metric), 1e-9) << name;
  }
}

TEST(Runner, RegisteredProbeDetectedUnregisteredNot) {
  const ExperimentReport rep = run_experiment(spec_for(ExperimentKind::RecognitionProbes), tiny());
  double reg = 0, unreg = 0;
  int n = 0;
  for (const auto& t : rep.trials) {
    if (t.status != TrialStatus::Ok || !t.detection_score) continue;
    if (t.probe_id == "triangle") reg += *t.detection_score, ++n;
    if (t.probe_id == "triangle-unregistered") unreg += *t.detection_score;
  }
  ASSERT_GT(n, 0);
  EXPECT_GT(reg, unreg);
}

TEST(Runner, BracketBetweenOracles) {
  ExperimentSpec s = spec_for(ExperimentKind::PitchCrop, "oracle:prior");
  s.bracket = true;
  const ExperimentReport rep = run_experiment(s, tiny());
  ASSERT_TRUE(rep.bracket);
  EXPECT_NEAR(rep.bracket->geometry_slope, 1.0, 0.05);
  EXPECT_NEAR(rep.bracket->prior_slope, 0.0, 0.05);
  EXPECT_TRUE(rep.bracket->within);
}

TEST(Runner, AllTrialsFailingIsEvaluationError) {
  ExperimentSpec s = spec_for(ExperimentKind::PitchCrop,
                              std::string("cmd:") + FAKE_ADAPTER_PATH + " --exchange {exchange} --mode exit");
  s.endpoint.timeout_s = 20;
  EXPECT_THROW(run_experiment(s, tiny()), EvaluationError);
}

TEST(Runner, FlipSkippedForOracle) {
  const ExperimentReport rep = run_experiment(spec_for(ExperimentKind::ContextAndFlip), tiny());
  bool saw_flip = false;
  for (const auto& t : rep.trials) {
    if (t.curve == "vertical_flip" && t.x == 1.0) {
      saw_flip = true;
      EXPECT_EQ(t.status, TrialStatus::Skipped);
    }
  }
  EXPECT_TRUE(saw_flip);
}

TEST(TrialsCsv, StatusNamesRoundTrip) {
  for (TrialStatus s : {TrialStatus::Ok, TrialStatus::ModelError, TrialStatus::FitError, TrialStatus::Skipped})
    EXPECT_EQ(parse_trial_status(to_string(s)), s);
}
