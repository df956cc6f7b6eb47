// Copyright 2026 The doaprior Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "doa/eval.h"

#include <cmath>

#include <gtest/gtest.h>

#include "doa/error.h"
#include "oracles.h"

namespace doa {
namespace {

TEST(AngularErrorTest, Examples) {
  EXPECT_EQ(AngularError(0, 0), 0.0);
  EXPECT_EQ(AngularError(358, 2), 4.0);
  EXPECT_EQ(AngularError(45, 200), 155.0);
  EXPECT_EQ(AngularError(0, 180), 180.0);
  EXPECT_EQ(AngularError(10, 350), 20.0);
}

TEST(AngularErrorTest, AgreesWithOracleOnGrid) {
  for (int a = 0; a < 360; a += 7) {
    for (int b = 0; b < 360; b += 11) {
      EXPECT_DOUBLE_EQ(AngularError(a, b), oracle::Circular(a, b));
      EXPECT_DOUBLE_EQ(AngularError(a, b), AngularError(b, a));
    }
  }
}

TEST(BinAccuracyTest, AllExact) {
  const std::vector<double> p(10, 42.0);
  EXPECT_EQ(BinAccuracy(p, 42.0, 0.0), 100.0);
}

TEST(BinAccuracyTest, UniformOverGrid) {
  // Grid angles within +-5 of 100 on a 2-degree grid: 96, 98, 100, 102, 104.
  std::vector<double> p;
  for (int i = 0; i < 180; ++i) p.push_back(2.0 * i);
  int expected_count = 0;
  for (double d : p) expected_count += oracle::Circular(d, 100.0) <= 5.0;
  ASSERT_EQ(expected_count, 5);
  EXPECT_NEAR(BinAccuracy(p, 100.0, 5.0), 100.0 * 5 / 180, 1e-12);
  EXPECT_NEAR(BinAccuracy(p, 100.0, 5.0), 2.78, 0.005);
  // Inclusive at the edge: +-4 keeps 96 and 104.
  EXPECT_NEAR(BinAccuracy(p, 100.0, 4.0), 100.0 * 5 / 180, 1e-12);
  EXPECT_NEAR(BinAccuracy(p, 0.0, 30.0), 100.0 * 31 / 180, 1e-12);
}

TEST(BinAccuracyTest, MonotoneInWidth) {
  std::vector<double> p;
  for (int i = 0; i < 50; ++i) p.push_back(std::fmod(i * 37.3, 360.0));
  double prev = -1;
  for (double w = 0; w <= 180; w += 0.5) {
    const double a = BinAccuracy(p, 10.0, w);
    EXPECT_GE(a, prev);
    EXPECT_LE(a, 100.0);
    prev = a;
  }
  EXPECT_EQ(prev, 100.0);
}

TEST(BinAccuracyTest, Errors) {
  const std::vector<double> none;
  EXPECT_THROW(BinAccuracy(none, 0.0, 5.0), ConfigError);
  const std::vector<double> one = {1.0};
  EXPECT_THROW(BinAccuracy(one, 0.0, -1.0), ConfigError);
}

// Small suite shared by the run_eval tests.
class RunEvalTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    SuiteConfig suite;
    suite.angles_deg = {30, 210};
    suite.snrs_db = {-10, 10};
    suite.duration_s = 1.024;
    scenes_ = new std::vector<EvalScene>(BuildSyntheticSuite(suite, geom()));
  }
  static void TearDownTestSuite() { delete scenes_; }
  static MicArrayGeometry geom() { return DefaultBenchmarkArray(); }
  static EvalConfig Config() {
    EvalConfig c;
    c.analysis.window_ms = 128;
    return c;
  }
  static std::vector<EvalScene>* scenes_;
};
std::vector<EvalScene>* RunEvalTest::scenes_ = nullptr;

TEST_F(RunEvalTest, CountsAndRanges) {
  const auto r = RunEval(*scenes_, geom(), Config(), PriorPolicy::None());
  EXPECT_EQ(r.total_frames(), 4 * 8);
  EXPECT_EQ(r.n_frames_scored + r.n_frames_vad_rejected, r.total_frames());
  EXPECT_EQ(r.n_evaluations, 180 * r.n_frames_scored);
  EXPECT_GE(r.avg_error_deg, 0.0);
  EXPECT_LE(r.avg_error_deg, 180.0);
  for (const auto& [w, a] : r.bin_accuracy) {
    EXPECT_GE(a, 0.0);
    EXPECT_LE(a, 100.0);
  }
  EXPECT_EQ(r.bin_accuracy.size(), 4u);
  EXPECT_FALSE(r.truth_obstructed);
}

TEST_F(RunEvalTest, ExpertPriorNoWorse) {
  const auto none = RunEval(*scenes_, geom(), Config(), PriorPolicy::None());
  const auto expert =
      RunEval(*scenes_, geom(), Config(), PriorPolicy::CenteredWidth(180));
  EXPECT_LE(expert.avg_error_deg, none.avg_error_deg);
  EXPECT_GE(expert.bin_accuracy.at(5.0), none.bin_accuracy.at(5.0));
  EXPECT_EQ(expert.n_evaluations, 90 * expert.n_frames_scored);
  // Frame by frame: restriction can only remove candidates other than truth.
  ASSERT_EQ(expert.predictions.size(), none.predictions.size());
  for (size_t k = 0; k < none.predictions.size(); ++k) {
    const auto& n = none.predictions[k];
    const auto& e = expert.predictions[k];
    if (AngularError(n.pred_deg, n.truth_deg) < 90.0) EXPECT_EQ(e.pred_deg, n.pred_deg);
  }
}

TEST_F(RunEvalTest, AllFreePriorMatchesNone) {
  const auto none = RunEval(*scenes_, geom(), Config(), PriorPolicy::None());
  const auto free =
      RunEval(*scenes_, geom(), Config(), PriorPolicy::Fixed(PriorMap::AllFree()));
  EXPECT_EQ(none.MetricsJson(), free.MetricsJson());
}

TEST_F(RunEvalTest, ObstructedTruthFlagged) {
  const auto prior = PriorPolicy::Fixed(ExpertPrior(std::vector<Arc>{{90.0, 180.0}}));
  const auto r = RunEval(*scenes_, geom(), Config(), prior);
  EXPECT_TRUE(r.truth_obstructed);
  for (const auto& p : r.predictions) {
    EXPECT_GE(p.pred_deg, 90.0);
    EXPECT_LT(p.pred_deg, 180.0);
  }
  EXPECT_GE(r.avg_error_deg, 30.0);
}

TEST_F(RunEvalTest, JobsDoNotChangeResults) {
  auto cfg = Config();
  const auto a = RunEval(*scenes_, geom(), cfg, PriorPolicy::None());
  cfg.jobs = 3;
  const auto b = RunEval(*scenes_, geom(), cfg, PriorPolicy::None());
  EXPECT_EQ(a.MetricsJson(), b.MetricsJson());
  ASSERT_EQ(a.predictions.size(), b.predictions.size());
  for (size_t k = 0; k < a.predictions.size(); ++k) {
    EXPECT_EQ(a.predictions[k].pred_deg, b.predictions[k].pred_deg);
  }
}

TEST_F(RunEvalTest, PooledEqualsManualPooling) {
  const auto pooled = RunEval(*scenes_, geom(), Config(), PriorPolicy::None());
  double err_sum = 0.0;
  int64_t n = 0;
  std::vector<ScoredPrediction> all;
  for (double snr : {-10.0, 10.0}) {
    std::vector<EvalScene> subset;
    for (const auto& s : *scenes_) {
      if (s.snr_db == snr) subset.push_back(s);
    }
    const auto r = RunEval(subset, geom(), Config(), PriorPolicy::None());
    err_sum += r.avg_error_deg * r.n_frames_scored;
    n += r.n_frames_scored;
    all.insert(all.end(), r.predictions.begin(), r.predictions.end());
  }
  EXPECT_EQ(pooled.n_frames_scored, n);
  EXPECT_NEAR(pooled.avg_error_deg, err_sum / n, 1e-12);
  EXPECT_NEAR(pooled.bin_accuracy.at(5.0), BinAccuracy(all, 5.0), 1e-12);
}

TEST_F(RunEvalTest, MismatchedSceneRejected) {
  auto scenes = *scenes_;
  scenes[0].audio.channels.pop_back();
  EXPECT_THROW(RunEval(scenes, geom(), Config(), PriorPolicy::None()), DataError);
  scenes = *scenes_;
  scenes[1].audio.sample_rate_hz = 8000;
  EXPECT_THROW(RunEval(scenes, geom(), Config(), PriorPolicy::None()), DataError);
}

TEST_F(RunEvalTest, SilentScenesHaveNothingToScore) {
  std::vector<EvalScene> silent(1);
  silent[0].audio.sample_rate_hz = 16000;
  silent[0].audio.channels.assign(4, std::vector<double>(4096, 0.0));
  EXPECT_THROW(RunEval(silent, geom(), Config(), PriorPolicy::None()), DataError);
}

TEST(RunSweepTest, RowCountsAndBinWidthMonotone) {
  SuiteConfig suite;
  suite.angles_deg = {0, 150};
  suite.snrs_db = {-10};
  suite.duration_s = 0.768;
  EvalConfig cfg;
  const std::vector<double> widths = {2, 5, 10, 20, 30};
  const auto rows = RunSweep(SweepAxis::kBinWidth, widths, suite,
                             DefaultBenchmarkArray(), cfg, PriorPolicy::None());
  ASSERT_EQ(rows.size(), widths.size());
  double prev = -1;
  for (const auto& r : rows) {
    const double a = r.report.bin_accuracy.at(r.axis_value);
    EXPECT_GE(a, prev);
    prev = a;
  }
  EXPECT_THROW(RunSweep(SweepAxis::kSnr, std::vector<double>{}, suite,
                        DefaultBenchmarkArray(), cfg, PriorPolicy::None()),
               ConfigError);
}

TEST(RunSweepTest, CachedPriorWidthMatchesDirect) {
  SuiteConfig suite;
  suite.angles_deg = {60, 240};
  suite.snrs_db = {-10};
  suite.duration_s = 0.768;
  EvalConfig cfg;
  cfg.analysis.window_ms = 128;
  const auto geom = DefaultBenchmarkArray();
  const std::vector<double> widths = {360, 270, 180, 90};
  const auto rows =
      RunSweep(SweepAxis::kPriorWidth, widths, suite, geom, cfg, PriorPolicy::None());
  ASSERT_EQ(rows.size(), 4u);
  const auto scenes = BuildSyntheticSuite(suite, geom);
  for (const auto& row : rows) {
    const auto direct =
        RunEval(scenes, geom, cfg, PriorPolicy::CenteredWidth(row.axis_value));
    EXPECT_EQ(row.report.MetricsJson(), direct.MetricsJson()) << row.axis_value;
  }
}

TEST(RunSweepTest, WindowAndSnrAxes) {
  SuiteConfig suite;
  suite.angles_deg = {90};
  suite.snrs_db = {0};
  suite.duration_s = 0.512;
  EvalConfig cfg;
  const auto geom = DefaultBenchmarkArray();
  const auto w = RunSweep(SweepAxis::kWindow, std::vector<double>{32, 64, 128}, suite,
                          geom, cfg, PriorPolicy::None());
  ASSERT_EQ(w.size(), 3u);
  EXPECT_EQ(w[0].report.total_frames(), 16);
  EXPECT_EQ(w[2].report.total_frames(), 4);
  const auto s = RunSweep(SweepAxis::kSnr, std::vector<double>{0, 30}, suite, geom,
                          cfg, PriorPolicy::None());
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(ParseSweepAxis("prior_width"), SweepAxis::kPriorWidth);
  EXPECT_THROW(ParseSweepAxis("hop"), ConfigError);
}

TEST(ReportsCsvTest, Columns) {
  EvalReport r;
  r.avg_error_deg = 1.5;
  r.bin_accuracy = {{2, 50}, {5, 75}, {10, 100}, {30, 100}};
  r.n_frames_scored = 4;
  r.predictions = {{0, 0}, {2, 0}, {4, 0}, {6, 0}};
  const std::vector<SweepRow> rows = {{128, r}};
  const auto csv = ReportsCsv(rows, "{\"k\":1}", false);
  EXPECT_EQ(csv,
            "# config: {\"k\":1}\n"
            "axis_value,avg_error_deg,acc_pm2,acc_pm5,acc_pm10,acc_pm30,n_frames\n"
            "128,1.500000,50.000000,75.000000,100.000000,100.000000,4\n");
  const std::vector<SweepRow> bw = {{3, r}};
  const auto with_axis = ReportsCsv(bw, "{}", true);
  EXPECT_NE(with_axis.find(",acc_pm_axis\n"), std::string::npos);
  // +-3 keeps 0 and 2 of the predictions.
  EXPECT_NE(with_axis.find("\n3,1.500000,50.000000,75.000000,100.000000,100.000000,4,50.000000\n"),
            std::string::npos);
}

}  // namespace
}  // namespace doa
