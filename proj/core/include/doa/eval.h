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

#ifndef DOA_EVAL_H_
#define DOA_EVAL_H_

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "doa/dsp.h"
#include "doa/estimators.h"
#include "doa/geometry.h"
#include "doa/prior.h"
#include "doa/simulator.h"

namespace doa {

// Circular distance min(|d|, 360 - |d|) in [0, 180].
double AngularError(double pred_deg, double truth_deg);

// Percentage of predictions within half_width_deg of truth. Throws
// ConfigError on an empty set or a negative half width.
double BinAccuracy(std::span<const double> preds_deg, double truth_deg,
                   double half_width_deg);

struct ScoredPrediction {
  double pred_deg = 0.0;
  double truth_deg = 0.0;
};

double BinAccuracy(std::span<const ScoredPrediction> preds,
                   double half_width_deg);
double AverageError(std::span<const ScoredPrediction> preds);

inline const std::vector<double> kReportHalfWidths = {2.0, 5.0, 10.0, 30.0};

struct EvalConfig {
  EstimatorOptions estimator;
  AnalysisOptions analysis;
  int grid_bins = kDefaultGridBins;
  // DFT snapshot length in samples; -1 picks DefaultSnapshotLen(method),
  // 0 is one snapshot per analysis frame.
  int snapshot_len = -1;
  int jobs = 1;

  // `analysis` with the snapshot length resolved.
  AnalysisOptions ResolvedAnalysis(int sample_rate_hz) const;
  std::string ToJson() const;
};

// Which prior each scene is evaluated under.
struct PriorPolicy {
  enum class Kind { kNone, kFixed, kCenteredWidth };

  Kind kind = Kind::kNone;
  PriorMap fixed = PriorMap::AllFree();
  double width_deg = 360.0;

  static PriorPolicy None() { return {}; }
  static PriorPolicy Fixed(PriorMap map);
  static PriorPolicy CenteredWidth(double width_deg);

  PriorMap ForTruth(double truth_deg) const;
  std::string Label() const;
};

struct EvalScene {
  std::string id;
  MultichannelAudio audio;
  double truth_deg = 0.0;
  double snr_db = 0.0;
};

struct EvalReport {
  double avg_error_deg = 0.0;
  std::map<double, double> bin_accuracy;  // half width -> percent
  int64_t n_frames_scored = 0;
  int64_t n_frames_vad_rejected = 0;
  int64_t n_evaluations = 0;  // total score_fn calls
  bool truth_obstructed = false;
  std::string config_json;
  std::vector<ScoredPrediction> predictions;

  int64_t total_frames() const {
    return n_frames_scored + n_frames_vad_rejected;
  }
  // Metrics only, without the config echo.
  std::string MetricsJson() const;
  std::string ToJson() const;
};

// Pools VAD-active frames across all scenes (unweighted). Throws DataError if
// no frame is active.
EvalReport RunEval(std::span<const EvalScene> scenes, const MicArrayGeometry& geom,
                   const EvalConfig& config, const PriorPolicy& prior,
                   std::span<const double> half_widths = kReportHalfWidths);

// The synthetic benchmark: angles x seeds clean scenes, each with one noisy
// variant per SNR.
struct SuiteConfig {
  std::vector<double> angles_deg = {0, 60, 120, 180, 240, 300};
  std::vector<double> snrs_db = {0, 5, 10, 20, 30};
  std::vector<uint64_t> seeds = {1};
  double duration_s = 3.0;
  std::optional<Reflector> reflector;

  std::string ToJson() const;
};

std::vector<EvalScene> BuildSyntheticSuite(const SuiteConfig& suite,
                                           const MicArrayGeometry& geom,
                                           int jobs = 1);

enum class SweepAxis { kWindow, kBinWidth, kPriorWidth, kSnr };

SweepAxis ParseSweepAxis(const std::string& name);
const char* SweepAxisName(SweepAxis axis);

struct SweepRow {
  double axis_value = 0.0;
  EvalReport report;
};

// One report per value. Window and prior-width sweeps reuse the same scenes;
// the SNR sweep rebuilds the suite at each level; the bin-width sweep scores
// one set of predictions at each half width. Throws ConfigError on empty
// values.
std::vector<SweepRow> RunSweep(SweepAxis axis, std::span<const double> values,
                               const SuiteConfig& suite,
                               const MicArrayGeometry& geom,
                               const EvalConfig& base,
                               const PriorPolicy& base_prior);

// Columns: axis_value, avg_error_deg, acc_pm2, acc_pm5, acc_pm10, acc_pm30,
// n_frames; bin-width sweeps add acc_pm_axis and labeled rows add prior. NaN
// axis values print as "pooled". Preceded by "# " comment lines
// carrying the config.
std::string ReportsCsv(std::span<const SweepRow> rows,
                       const std::string& config_json, bool with_axis_accuracy,
                       const std::vector<std::string>& labels = {});

}  // namespace doa

#endif  // DOA_EVAL_H_
