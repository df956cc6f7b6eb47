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

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include "doa/error.h"
#include "json.hpp"
#include "parallel.h"

namespace doa {
namespace {

std::string FormatNumber(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

std::string WidthKey(double w) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", w);
  return buf;
}

// One analysed frame: its activity flag and, when active, the full-grid
// scores (only filled on the cached path).
struct FrameScores {
  bool active = false;
  std::vector<double> scores;
};

struct SceneResult {
  std::vector<ScoredPrediction> preds;
  int64_t rejected = 0;
  int64_t evaluations = 0;
  bool truth_obstructed = false;
};

EvalReport Aggregate(std::vector<SceneResult> results, const EvalConfig& config,
                     const PriorPolicy& prior,
                     std::span<const double> half_widths) {
  EvalReport report;
  for (auto& r : results) {
    report.predictions.insert(report.predictions.end(), r.preds.begin(),
                              r.preds.end());
    report.n_frames_vad_rejected += r.rejected;
    report.n_evaluations += r.evaluations;
    report.truth_obstructed = report.truth_obstructed || r.truth_obstructed;
  }
  report.n_frames_scored = static_cast<int64_t>(report.predictions.size());
  if (report.predictions.empty()) {
    throw DataError("no VAD-active frames to score");
  }
  report.avg_error_deg = AverageError(report.predictions);
  for (double w : half_widths) {
    report.bin_accuracy[w] = BinAccuracy(report.predictions, w);
  }
  auto cfg = nlohmann::json::parse(config.ToJson());
  cfg["prior"] = prior.Label();
  report.config_json = cfg.dump();
  return report;
}

std::vector<FrameScores> ScoreScene(const EvalScene& scene,
                                    const MicArrayGeometry& geom,
                                    const EvalConfig& config,
                                    const AngularGrid& grid) {
  const auto spectra =
      AnalyzeAudio(scene.audio, config.ResolvedAnalysis(scene.audio.sample_rate_hz));
  std::vector<FrameScores> out;
  out.reserve(spectra.size());
  for (const auto& s : spectra) {
    FrameScores f;
    f.active = s.vad_active;
    if (f.active) {
      const auto scorer = MakeScorer(s, geom, config.estimator);
      f.scores = ScanScores(*scorer, grid, config.estimator.method, s.frame_index)
                     .scores;
    }
    out.push_back(std::move(f));
  }
  return out;
}

SceneResult ApplyPrior(const std::vector<FrameScores>& frames,
                       const AngularGrid& grid, const PriorMap& prior,
                       double truth_deg, bool refine) {
  SceneResult r;
  r.truth_obstructed = !prior.IsFree(truth_deg);
  const double step = 2.0 * kPi / grid.size();
  for (const auto& f : frames) {
    if (!f.active) {
      ++r.rejected;
      continue;
    }
    const auto lookup = [&](double rad) {
      const auto i = static_cast<int>(std::lround(rad / step)) % grid.size();
      return f.scores[i];
    };
    const auto est = ArgmaxWithPrior(lookup, grid, prior, refine);
    r.evaluations += est.evaluations;
    r.preds.push_back({est.azimuth_deg, truth_deg});
  }
  return r;
}

}  // namespace

double AngularError(double pred_deg, double truth_deg) {
  const double d = std::fmod(std::abs(pred_deg - truth_deg), 360.0);
  return std::min(d, 360.0 - d);
}

double BinAccuracy(std::span<const double> preds_deg, double truth_deg,
                   double half_width_deg) {
  std::vector<ScoredPrediction> p;
  p.reserve(preds_deg.size());
  for (double d : preds_deg) p.push_back({d, truth_deg});
  return BinAccuracy(p, half_width_deg);
}

double BinAccuracy(std::span<const ScoredPrediction> preds,
                   double half_width_deg) {
  if (preds.empty()) throw ConfigError("bin accuracy of an empty prediction set");
  if (!(half_width_deg >= 0.0)) throw ConfigError("half width must be >= 0");
  const auto hits = std::count_if(preds.begin(), preds.end(), [&](const auto& p) {
    return AngularError(p.pred_deg, p.truth_deg) <= half_width_deg + 1e-9;
  });
  return 100.0 * static_cast<double>(hits) / static_cast<double>(preds.size());
}

double AverageError(std::span<const ScoredPrediction> preds) {
  if (preds.empty()) throw ConfigError("average error of an empty prediction set");
  double sum = 0.0;
  for (const auto& p : preds) sum += AngularError(p.pred_deg, p.truth_deg);
  return sum / static_cast<double>(preds.size());
}

AnalysisOptions EvalConfig::ResolvedAnalysis(int sample_rate_hz) const {
  AnalysisOptions a = analysis;
  a.dft.snapshot_len = snapshot_len >= 0
                           ? snapshot_len
                           : DefaultSnapshotLen(estimator.method, sample_rate_hz);
  return a;
}

std::string EvalConfig::ToJson() const {
  nlohmann::json doc;
  doc["method"] = MethodName(estimator.method);
  doc["num_sources"] = estimator.num_sources;
  doc["tops_projection"] = estimator.tops_projection;
  doc["refine_peak"] = estimator.refine_peak;
  doc["window_ms"] = analysis.window_ms;
  doc["hop_ms"] = analysis.hop_ms > 0.0 ? analysis.hop_ms : analysis.window_ms;
  doc["window_fn"] = analysis.dft.window == WindowType::kHann ? "hann" : "rect";
  doc["snapshot_len"] = snapshot_len;
  doc["snapshot_hop"] = analysis.dft.snapshot_hop;
  doc["fft_size"] = analysis.dft.fft_size;
  doc["band_hz"] = {analysis.band_lo_hz, analysis.band_hi_hz};
  doc["vad_threshold"] = analysis.vad_threshold;
  doc["grid_bins"] = grid_bins;
  return doc.dump();
}

PriorPolicy PriorPolicy::Fixed(PriorMap map) {
  PriorPolicy p;
  p.kind = Kind::kFixed;
  p.fixed = std::move(map);
  return p;
}

PriorPolicy PriorPolicy::CenteredWidth(double width_deg) {
  if (!(width_deg > 0.0)) throw ConfigError("prior width must be positive");
  PriorPolicy p;
  p.kind = Kind::kCenteredWidth;
  p.width_deg = width_deg;
  return p;
}

PriorMap PriorPolicy::ForTruth(double truth_deg) const {
  switch (kind) {
    case Kind::kFixed:
      return fixed;
    case Kind::kCenteredWidth:
      return CenteredFreePrior(truth_deg, width_deg);
    case Kind::kNone:
      break;
  }
  return PriorMap::AllFree();
}

std::string PriorPolicy::Label() const {
  switch (kind) {
    case Kind::kFixed:
      return std::string(PriorSourceName(fixed.source())) + ":" +
             WidthKey(fixed.FreeWidthDeg()) + "deg-free";
    case Kind::kCenteredWidth:
      return "expert:" + WidthKey(width_deg) + "deg-centered";
    case Kind::kNone:
      break;
  }
  return "none";
}

std::string EvalReport::MetricsJson() const {
  nlohmann::ordered_json doc;
  doc["avg_error_deg"] = avg_error_deg;
  nlohmann::ordered_json acc = nlohmann::ordered_json::object();
  for (const auto& [w, a] : bin_accuracy) acc[WidthKey(w)] = a;
  doc["bin_accuracy"] = acc;
  doc["n_frames_scored"] = n_frames_scored;
  doc["n_frames_vad_rejected"] = n_frames_vad_rejected;
  doc["n_evaluations"] = n_evaluations;
  doc["truth_obstructed"] = truth_obstructed;
  return doc.dump();
}

std::string EvalReport::ToJson() const {
  auto doc = nlohmann::ordered_json::parse(MetricsJson());
  doc["config"] = config_json.empty() ? nlohmann::ordered_json::object()
                                      : nlohmann::ordered_json::parse(config_json);
  return doc.dump(2);
}

EvalReport RunEval(std::span<const EvalScene> scenes, const MicArrayGeometry& geom,
                   const EvalConfig& config, const PriorPolicy& prior,
                   std::span<const double> half_widths) {
  const auto grid = AngularGrid::Uniform(config.grid_bins);
  std::vector<SceneResult> results(scenes.size());
  internal::ParallelFor(static_cast<int>(scenes.size()), config.jobs, [&](int i) {
    const auto& scene = scenes[i];
    if (scene.audio.num_channels() != geom.num_mics()) {
      throw DataError("scene '" + scene.id + "' has " +
                      std::to_string(scene.audio.num_channels()) +
                      " channels, geometry has " +
                      std::to_string(geom.num_mics()));
    }
    if (scene.audio.sample_rate_hz != geom.sample_rate_hz()) {
      throw DataError("scene '" + scene.id +
                      "' sample rate does not match the geometry");
    }
    const auto map = prior.ForTruth(scene.truth_deg);
    const auto spectra = AnalyzeAudio(
        scene.audio, config.ResolvedAnalysis(scene.audio.sample_rate_hz));
    SceneResult& r = results[i];
    r.truth_obstructed = !map.IsFree(scene.truth_deg);
    for (const auto& s : spectra) {
      if (!s.vad_active) {
        ++r.rejected;
        continue;
      }
      const auto est = EstimateFrame(s, geom, grid, map, config.estimator);
      r.evaluations += est.evaluations;
      r.preds.push_back({est.azimuth_deg, scene.truth_deg});
    }
  });
  return Aggregate(std::move(results), config, prior, half_widths);
}

std::string SuiteConfig::ToJson() const {
  nlohmann::json doc;
  doc["angles_deg"] = angles_deg;
  doc["snrs_db"] = snrs_db;
  doc["seeds"] = seeds;
  doc["duration_s"] = duration_s;
  if (reflector) {
    doc["reflector"] = {{"azimuth_deg", reflector->azimuth_deg},
                        {"delay_ms", reflector->delay_ms},
                        {"gain", reflector->gain}};
  }
  return doc.dump();
}

std::vector<EvalScene> BuildSyntheticSuite(const SuiteConfig& suite,
                                           const MicArrayGeometry& geom,
                                           int jobs) {
  if (suite.angles_deg.empty() || suite.seeds.empty() || suite.snrs_db.empty()) {
    throw ConfigError("synthetic suite needs angles, seeds and SNRs");
  }
  const int n_angles = static_cast<int>(suite.angles_deg.size());
  const int n_seeds = static_cast<int>(suite.seeds.size());
  std::vector<std::vector<EvalScene>> per_scene(n_angles * n_seeds);
  internal::ParallelFor(n_angles * n_seeds, jobs, [&](int idx) {
    const int a = idx / n_seeds;
    const int s = idx % n_seeds;
    SceneSpec spec;
    spec.true_azimuth_deg = suite.angles_deg[a];
    spec.snr_db = suite.snrs_db;
    spec.duration_s = suite.duration_s;
    // Each angle gets its own source realization.
    spec.seed = suite.seeds[s] * 1000003ULL + static_cast<uint64_t>(a);
    spec.reflector = suite.reflector;
    auto scene = SynthScene(spec, geom);
    for (size_t k = 0; k < suite.snrs_db.size(); ++k) {
      EvalScene e;
      std::ostringstream id;
      id << "az" << suite.angles_deg[a] << "_seed" << suite.seeds[s] << "_snr"
         << suite.snrs_db[k];
      e.id = id.str();
      e.audio = std::move(scene.noisy[k]);
      e.truth_deg = spec.true_azimuth_deg;
      e.snr_db = suite.snrs_db[k];
      per_scene[idx].push_back(std::move(e));
    }
  });
  std::vector<EvalScene> out;
  for (auto& v : per_scene) {
    for (auto& e : v) out.push_back(std::move(e));
  }
  return out;
}

SweepAxis ParseSweepAxis(const std::string& name) {
  if (name == "window") return SweepAxis::kWindow;
  if (name == "bin_width") return SweepAxis::kBinWidth;
  if (name == "prior_width") return SweepAxis::kPriorWidth;
  if (name == "snr") return SweepAxis::kSnr;
  throw ConfigError("sweep axis must be window, bin_width, prior_width or snr");
}

const char* SweepAxisName(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::kBinWidth:
      return "bin_width";
    case SweepAxis::kPriorWidth:
      return "prior_width";
    case SweepAxis::kSnr:
      return "snr";
    case SweepAxis::kWindow:
      break;
  }
  return "window";
}

std::vector<SweepRow> RunSweep(SweepAxis axis, std::span<const double> values,
                               const SuiteConfig& suite,
                               const MicArrayGeometry& geom,
                               const EvalConfig& base,
                               const PriorPolicy& base_prior) {
  if (values.empty()) throw ConfigError("sweep needs at least one value");
  std::vector<SweepRow> rows;

  switch (axis) {
    case SweepAxis::kWindow: {
      const auto scenes = BuildSyntheticSuite(suite, geom, base.jobs);
      for (double v : values) {
        EvalConfig cfg = base;
        cfg.analysis.window_ms = v;
        cfg.analysis.hop_ms = 0.0;
        rows.push_back({v, RunEval(scenes, geom, cfg, base_prior)});
      }
      break;
    }
    case SweepAxis::kSnr: {
      for (double v : values) {
        SuiteConfig s = suite;
        s.snrs_db = {v};
        const auto scenes = BuildSyntheticSuite(s, geom, base.jobs);
        rows.push_back({v, RunEval(scenes, geom, base, base_prior)});
      }
      break;
    }
    case SweepAxis::kBinWidth: {
      std::set<double> widths(kReportHalfWidths.begin(), kReportHalfWidths.end());
      widths.insert(values.begin(), values.end());
      const std::vector<double> all(widths.begin(), widths.end());
      const auto scenes = BuildSyntheticSuite(suite, geom, base.jobs);
      const auto report = RunEval(scenes, geom, base, base_prior, all);
      for (double v : values) rows.push_back({v, report});
      break;
    }
    case SweepAxis::kPriorWidth: {
      // Score every frame once on the full grid; each width then only
      // restricts the argmax.
      const auto scenes = BuildSyntheticSuite(suite, geom, base.jobs);
      const auto grid = AngularGrid::Uniform(base.grid_bins);
      std::vector<std::vector<FrameScores>> scored(scenes.size());
      internal::ParallelFor(static_cast<int>(scenes.size()), base.jobs, [&](int i) {
        scored[i] = ScoreScene(scenes[i], geom, base, grid);
      });
      for (double v : values) {
        const auto policy = PriorPolicy::CenteredWidth(v);
        std::vector<SceneResult> results;
        for (size_t i = 0; i < scenes.size(); ++i) {
          results.push_back(ApplyPrior(scored[i], grid,
                                       policy.ForTruth(scenes[i].truth_deg),
                                       scenes[i].truth_deg,
                                       base.estimator.refine_peak));
        }
        rows.push_back({v, Aggregate(std::move(results), base, policy,
                                     kReportHalfWidths)});
      }
      break;
    }
  }
  return rows;
}

std::string ReportsCsv(std::span<const SweepRow> rows,
                       const std::string& config_json, bool with_axis_accuracy,
                       const std::vector<std::string>& labels) {
  std::ostringstream out;
  out << "# config: " << config_json << "\n";
  out << "axis_value,avg_error_deg,acc_pm2,acc_pm5,acc_pm10,acc_pm30,n_frames";
  if (with_axis_accuracy) out << ",acc_pm_axis";
  if (!labels.empty()) out << ",prior";
  out << "\n";
  for (size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i].report;
    auto acc = [&](double w) {
      auto it = r.bin_accuracy.find(w);
      return it == r.bin_accuracy.end() ? BinAccuracy(r.predictions, w)
                                        : it->second;
    };
    if (std::isnan(rows[i].axis_value)) {
      out << "pooled";
    } else {
      out << WidthKey(rows[i].axis_value);
    }
    out << "," << FormatNumber(r.avg_error_deg) << "," << FormatNumber(acc(2))
        << "," << FormatNumber(acc(5)) << "," << FormatNumber(acc(10)) << ","
        << FormatNumber(acc(30)) << "," << r.n_frames_scored;
    if (with_axis_accuracy) out << "," << FormatNumber(acc(rows[i].axis_value));
    if (!labels.empty()) out << "," << (i < labels.size() ? labels[i] : "");
    out << "\n";
  }
  return out.str();
}

}  // namespace doa
