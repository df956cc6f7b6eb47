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

#include "cli/commands.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "doa/error.h"
#include "doa/estimators.h"
#include "doa/eval.h"
#include "doa/geometry.h"
#include "doa/prior.h"
#include "doa/simulator.h"
#include "doa/wav_io.h"
#include "json.hpp"

namespace doa::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

// Resolved options shared by the subcommands; echoed into every output.
struct RunConfig {
  std::string subcommand;
  std::string method = "srp-phat";
  int num_sources = 1;
  bool no_tops_projection = false;
  bool refine = false;
  double window_ms = 256.0;
  double hop_ms = 0.0;
  std::string band = "500:8000";
  int grid_bins = kDefaultGridBins;
  double vad_threshold = 0.5;
  int snapshot_len = -1;
  int fft_size = 0;
  std::string geometry_path;
  std::vector<std::string> priors;
  std::optional<uint64_t> seed;
  int jobs = 1;
};

std::pair<double, double> ParsePair(const std::string& text,
                                    const std::string& what) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) {
    throw ConfigError(what + " must look like a:b, got '" + text + "'");
  }
  try {
    size_t used = 0;
    const double a = std::stod(text.substr(0, colon), &used);
    if (used != colon) throw std::invalid_argument(text);
    const std::string rest = text.substr(colon + 1);
    const double b = std::stod(rest, &used);
    if (used != rest.size()) throw std::invalid_argument(text);
    return {a, b};
  } catch (const std::logic_error&) {
    throw ConfigError(what + " must look like a:b, got '" + text + "'");
  }
}

std::optional<uint64_t> EnvSeed() {
  const char* env = std::getenv("DOA_SEED");
  if (env == nullptr || *env == '\0') return std::nullopt;
  try {
    return std::stoull(env);
  } catch (const std::logic_error&) {
    throw ConfigError(std::string("DOA_SEED is not an integer: ") + env);
  }
}

MicArrayGeometry ResolveGeometry(const std::string& path) {
  if (path.empty()) return DefaultBenchmarkArray();
  if (!fs::exists(path)) throw ConfigError("geometry file not found: " + path);
  return MicArrayGeometry::Load(path);
}

ordered_json ConfigJson(const RunConfig& c, const MicArrayGeometry& geom) {
  ordered_json j;
  j["subcommand"] = c.subcommand;
  j["method"] = c.method;
  j["num_sources"] = c.num_sources;
  j["tops_projection"] = !c.no_tops_projection;
  j["refine_peak"] = c.refine;
  j["window_ms"] = c.window_ms;
  j["hop_ms"] = c.hop_ms > 0.0 ? c.hop_ms : c.window_ms;
  j["band_hz"] = c.band;
  j["grid_bins"] = c.grid_bins;
  j["vad_threshold"] = c.vad_threshold;
  j["snapshot_len"] = c.snapshot_len;
  j["fft_size"] = c.fft_size;
  j["geometry"] = ordered_json::parse(geom.ToJson());
  j["geometry_path"] = c.geometry_path;
  j["priors"] = c.priors;
  if (c.seed) {
    j["seed"] = *c.seed;
  } else {
    j["seed"] = nullptr;
  }
  j["jobs"] = c.jobs;
  return j;
}

EvalConfig ToEvalConfig(const RunConfig& c, const MicArrayGeometry& geom) {
  EvalConfig e;
  e.estimator.method = ParseMethod(c.method);
  e.estimator.num_sources = c.num_sources;
  e.estimator.tops_projection = !c.no_tops_projection;
  e.estimator.refine_peak = c.refine;
  if ((e.estimator.method == Method::kMusic ||
       e.estimator.method == Method::kTops) &&
      (c.num_sources < 1 || c.num_sources >= geom.num_mics())) {
    throw ConfigError("--num-sources must satisfy 1 <= P < M (M=" +
                      std::to_string(geom.num_mics()) + ")");
  }
  e.analysis.window_ms = c.window_ms;
  e.analysis.hop_ms = c.hop_ms;
  const auto [lo, hi] = ParsePair(c.band, "--band");
  if (!(lo >= 0.0 && lo < hi && hi <= geom.sample_rate_hz() / 2.0)) {
    throw ConfigError("--band must satisfy 0 <= lo < hi <= fs/2");
  }
  e.analysis.band_lo_hz = lo;
  e.analysis.band_hi_hz = hi;
  if (c.vad_threshold < 0.0) throw ConfigError("--vad-threshold must be >= 0");
  e.analysis.vad_threshold = c.vad_threshold;
  e.analysis.dft.fft_size = c.fft_size;
  if (c.window_ms <= 0.0) throw ConfigError("--window-ms must be positive");
  if (c.hop_ms > c.window_ms) throw ConfigError("--hop-ms must not exceed --window-ms");
  if (c.grid_bins < 1) throw ConfigError("--grid-bins must be >= 1");
  e.grid_bins = c.grid_bins;
  e.snapshot_len = c.snapshot_len;
  e.jobs = std::max(1, c.jobs);
  return e;
}

void AddAnalysisOptions(CLI::App* app, RunConfig& c) {
  app->add_option("--method", c.method, "srp-phat, music, tops or gcc-pair")
      ->capture_default_str();
  app->add_option("--num-sources", c.num_sources, "subspace dimension P")
      ->capture_default_str();
  app->add_flag("--no-tops-projection", c.no_tops_projection,
                "disable the TOPS projection step");
  app->add_flag("--refine", c.refine, "parabolic sub-bin peak refinement");
  app->add_option("--window-ms", c.window_ms, "analysis window")->capture_default_str();
  app->add_option("--hop-ms", c.hop_ms, "hop (0 = window)")->capture_default_str();
  app->add_option("--band", c.band, "frequency band lo:hi in Hz")->capture_default_str();
  app->add_option("--grid-bins", c.grid_bins, "uniform azimuth bins")->capture_default_str();
  app->add_option("--vad-threshold", c.vad_threshold,
                  "active iff energy >= ratio * median frame energy")
      ->capture_default_str();
  app->add_option("--snapshot-len", c.snapshot_len,
                  "DFT snapshot length in samples (-1 method default, 0 whole frame)")
      ->capture_default_str();
  app->add_option("--fft-size", c.fft_size, "DFT size (0 = next power of two)")
      ->capture_default_str();
  app->add_option("--geometry", c.geometry_path,
                  "geometry JSON (default: 4-mic 28.3 mm circle, 16 kHz)");
  app->add_option("--jobs", c.jobs, "scene-level worker threads")->capture_default_str();
}

void WriteText(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << text;
}

std::string ReadText(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// none | expert:<width> (free arc centered on each scene's truth) |
// file:<prior.json> | visual:<prior.json>
PriorPolicy ParsePriorSpec(const std::string& spec) {
  if (spec == "none") return PriorPolicy::None();
  const auto colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : spec.substr(colon + 1);
  if (kind == "expert" && !arg.empty()) {
    try {
      return PriorPolicy::CenteredWidth(std::stod(arg));
    } catch (const std::logic_error&) {
      throw ConfigError("bad expert prior width in '" + spec + "'");
    }
  }
  if ((kind == "file" || kind == "visual") && !arg.empty()) {
    if (!fs::exists(arg)) throw ConfigError("prior file not found: " + arg);
    return PriorPolicy::Fixed(PriorMap::Load(arg));
  }
  throw ConfigError("prior must be none, expert:<width>, file:<path> or "
                    "visual:<path>; got '" + spec + "'");
}

// --- simulate --------------------------------------------------------------

struct SimulateArgs {
  double angle = 0.0;
  std::vector<double> snrs;
  double duration = 3.0;
  std::string out;
  std::string truth;
  std::optional<double> reflector_angle;
  double reflector_delay_ms = 8.0;
  double reflector_gain = 0.9;
  std::string format = "float32";
};

fs::path VariantPath(const fs::path& out, double snr) {
  std::ostringstream name;
  name << out.stem().string() << ".snr" << snr << out.extension().string();
  return out.parent_path() / name.str();
}

int CmdSimulate(const RunConfig& c, const SimulateArgs& a, std::ostream& out) {
  const auto geom = ResolveGeometry(c.geometry_path);
  SceneSpec spec;
  spec.true_azimuth_deg = a.angle;
  spec.snr_db = a.snrs;
  spec.duration_s = a.duration;
  spec.seed = c.seed.value_or(0);
  if (a.reflector_angle) {
    spec.reflector = Reflector{*a.reflector_angle, a.reflector_delay_ms,
                               a.reflector_gain};
  }
  if (!(a.angle >= 0.0 && a.angle < 360.0)) {
    throw ConfigError("--angle must lie in [0, 360)");
  }
  const auto format =
      a.format == "pcm16" ? WavSampleFormat::kPcm16 : WavSampleFormat::kFloat32;
  Scene scene = SynthScene(spec, geom);
  // PCM16 clips at full scale; one common gain keeps every variant in range
  // (DoA estimates are invariant to it).
  double gain = 1.0;
  if (format == WavSampleFormat::kPcm16) {
    double peak = 0.0;
    auto scan = [&](const MultichannelAudio& a) {
      for (const auto& ch : a.channels) {
        for (double v : ch) peak = std::max(peak, std::abs(v));
      }
    };
    scan(scene.clean);
    for (const auto& n : scene.noisy) scan(n);
    if (peak > 0.0) gain = 0.99 / peak;
    auto apply = [&](MultichannelAudio& a) {
      for (auto& ch : a.channels) {
        for (double& v : ch) v *= gain;
      }
    };
    apply(scene.clean);
    for (auto& n : scene.noisy) apply(n);
  }

  ordered_json files = ordered_json::array();
  if (a.snrs.empty()) {
    WriteWav(a.out, scene.clean, format);
    files.push_back({{"snr_db", nullptr}, {"path", a.out}});
  } else if (a.snrs.size() == 1) {
    WriteWav(a.out, scene.noisy[0], format);
    files.push_back({{"snr_db", a.snrs[0]}, {"path", a.out}});
  } else {
    for (size_t k = 0; k < a.snrs.size(); ++k) {
      const auto path = VariantPath(a.out, a.snrs[k]);
      WriteWav(path, scene.noisy[k], format);
      files.push_back({{"snr_db", a.snrs[k]}, {"path", path.string()}});
    }
  }
  auto truth = ordered_json::parse(TruthToJson(scene.truth));
  truth["files"] = files;
  auto config = ConfigJson(c, geom);
  config["format"] = a.format;
  config["output_gain"] = gain;
  truth["config"] = config;
  WriteText(a.truth, truth.dump(2) + "\n");
  out << "wrote " << files.size() << " scene file(s) and " << a.truth << "\n";
  return kExitOk;
}

// --- prior -----------------------------------------------------------------

int CmdPriorExpert(const RunConfig& c, const std::vector<std::string>& free,
                   const std::string& out_path, std::ostream& out) {
  std::vector<Arc> arcs;
  for (const auto& f : free) {
    const auto [a, b] = ParsePair(f, "--free");
    arcs.push_back({a, b});
  }
  const auto prior = ExpertPrior(arcs);
  auto doc = ordered_json::parse(prior.ToJson());
  ordered_json config;
  config["subcommand"] = c.subcommand;
  config["free"] = free;
  doc["config"] = config;
  WriteText(out_path, doc.dump(2) + "\n");
  out << "prior: " << prior.FreeWidthDeg() << " deg free in "
      << prior.FreeIntervals().size() << " interval(s)\n";
  return kExitOk;
}

struct VisualArgs {
  std::string segstats;
  std::string thresholds;
  std::string rule;
  std::string out;
  std::string log;
  bool strict_coverage = false;
};

int CmdPriorVisual(const RunConfig& c, const VisualArgs& a, std::ostream& out,
                   std::ostream& err) {
  if (!fs::exists(a.segstats)) {
    throw ConfigError("segmentation stats file not found: " + a.segstats);
  }
  const std::string text = ReadText(a.segstats);
  if (text.find_first_not_of(" \t\r\n") == std::string::npos) {
    throw ConfigError("segmentation stats file is empty: " + a.segstats);
  }
  const auto frames = ParseSegmentationFrames(text);
  if (frames.empty()) throw ConfigError("segmentation stats file is empty: " + a.segstats);
  auto thresholds = a.thresholds.empty() ? ThresholdConfig::Default()
                                         : ThresholdConfig::Load(a.thresholds);
  if (!a.rule.empty()) thresholds.rule = ParseFreeRule(a.rule);
  const auto result = PriorFromSegmentation(frames, thresholds, a.strict_coverage);
  for (const auto& w : result.warnings) err << "warning: " << w << "\n";

  ordered_json config;
  config["subcommand"] = c.subcommand;
  config["segstats"] = a.segstats;
  config["thresholds_path"] = a.thresholds;
  ordered_json classes = ordered_json::object();
  for (const auto& [name, t] : thresholds.classes) classes[name] = t;
  config["classes"] = classes;
  config["rule"] = FreeRuleName(thresholds.rule);
  if (thresholds.sum_threshold) config["sum_threshold"] = *thresholds.sum_threshold;
  config["strict_coverage"] = a.strict_coverage;

  auto doc = ordered_json::parse(result.prior.ToJson());
  doc["config"] = config;
  WriteText(a.out, doc.dump(2) + "\n");

  const std::string log_path = a.log.empty() ? a.out + ".decisions.csv" : a.log;
  std::ostringstream log;
  log << "# config: " << config.dump() << "\n";
  log << "heading_deg,frustum_deg,free\n";
  for (const auto& d : result.decisions) {
    log << d.heading_deg << "," << d.frustum_deg << "," << (d.free ? 1 : 0) << "\n";
  }
  WriteText(log_path, log.str());
  out << "visual prior: " << result.prior.FreeWidthDeg() << " deg free; log "
      << log_path << "\n";
  return kExitOk;
}

// --- estimate --------------------------------------------------------------

int CmdEstimate(const RunConfig& c, const std::string& input,
                const std::string& out_path, std::ostream& out) {
  const auto geom = ResolveGeometry(c.geometry_path);
  const auto cfg = ToEvalConfig(c, geom);
  if (c.priors.size() > 1) throw ConfigError("estimate takes at most one --prior");
  PriorMap prior = PriorMap::AllFree();
  if (!c.priors.empty()) {
    if (!fs::exists(c.priors[0])) {
      throw ConfigError("prior file not found: " + c.priors[0]);
    }
    prior = PriorMap::Load(c.priors[0]);
  }
  const auto audio = ReadWav(input);
  if (audio.sample_rate_hz != geom.sample_rate_hz()) {
    throw DataError("WAV sample rate " + std::to_string(audio.sample_rate_hz) +
                    " does not match geometry rate " +
                    std::to_string(geom.sample_rate_hz()));
  }
  if (audio.num_channels() != geom.num_mics()) {
    throw DataError("WAV has " + std::to_string(audio.num_channels()) +
                    " channels, geometry has " + std::to_string(geom.num_mics()));
  }
  const auto spectra = AnalyzeAudio(audio, cfg.ResolvedAnalysis(audio.sample_rate_hz));
  const auto grid = AngularGrid::Uniform(cfg.grid_bins);

  auto config = ConfigJson(c, geom);
  config["input"] = input;
  std::ostringstream csv;
  csv << "# config: " << config.dump() << "\n";
  csv << "frame_index,frame_start,vad_active,azimuth_deg,score\n";
  char buf[64];
  for (const auto& s : spectra) {
    csv << s.frame_index << "," << s.frame_start << "," << (s.vad_active ? 1 : 0)
        << ",";
    if (s.vad_active) {
      const auto est = EstimateFrame(s, geom, grid, prior, cfg.estimator);
      std::snprintf(buf, sizeof(buf), "%.4f,%.9g", est.azimuth_deg, est.score);
      csv << buf;
    } else {
      csv << ",";
    }
    csv << "\n";
  }
  if (out_path.empty() || out_path == "-") {
    out << csv.str();
  } else {
    WriteText(out_path, csv.str());
  }
  return kExitOk;
}

// --- eval / sweep -----------------------------------------------------------

struct SuiteArgs {
  std::vector<double> angles = {0, 60, 120, 180, 240, 300};
  std::vector<double> snrs = {0, 5, 10, 20, 30};
  std::vector<uint64_t> seeds;
  double duration = 3.0;
  std::optional<double> reflector_angle;
  double reflector_delay_ms = 8.0;
  double reflector_gain = 0.9;
  std::vector<std::string> scenes;  // wav:truth.json pairs
  bool pool_snr = false;
  std::string out_csv;
  std::string out_json;
};

void AddSuiteOptions(CLI::App* app, SuiteArgs& s) {
  app->add_option("--angles", s.angles, "synthetic source azimuths (deg)")
      ->delimiter(',');
  app->add_option("--snrs", s.snrs, "synthetic SNR levels (dB)")->delimiter(',');
  app->add_option("--seeds", s.seeds, "synthetic seeds (default DOA_SEED or 1)")
      ->delimiter(',');
  app->add_option("--duration", s.duration, "synthetic scene length (s)")
      ->capture_default_str();
  app->add_option("--reflector-angle", s.reflector_angle,
                  "add a coherent reflected copy from this azimuth (deg)");
  app->add_option("--reflector-delay-ms", s.reflector_delay_ms)->capture_default_str();
  app->add_option("--reflector-gain", s.reflector_gain)->capture_default_str();
  app->add_option("--out-csv", s.out_csv, "CSV report path");
  app->add_option("--out-json", s.out_json, "JSON report path");
}

SuiteConfig ToSuite(const SuiteArgs& s, RunConfig& c) {
  SuiteConfig suite;
  suite.angles_deg = s.angles;
  suite.snrs_db = s.snrs;
  if (!s.seeds.empty()) {
    suite.seeds = s.seeds;
  } else if (c.seed) {
    suite.seeds = {*c.seed};
  }
  suite.duration_s = s.duration;
  if (s.reflector_angle) {
    suite.reflector =
        Reflector{*s.reflector_angle, s.reflector_delay_ms, s.reflector_gain};
  }
  return suite;
}

std::vector<EvalScene> LoadSceneFiles(const std::vector<std::string>& specs) {
  std::vector<EvalScene> scenes;
  for (const auto& spec : specs) {
    const auto colon = spec.rfind(':');
    if (colon == std::string::npos) {
      throw ConfigError("--scene must be <wav>:<truth.json>, got '" + spec + "'");
    }
    EvalScene e;
    e.id = spec.substr(0, colon);
    e.audio = ReadWav(e.id);
    e.truth_deg = ReadTruthAzimuth(ReadText(spec.substr(colon + 1)));
    e.snr_db = std::numeric_limits<double>::quiet_NaN();
    scenes.push_back(std::move(e));
  }
  return scenes;
}

void EmitReports(const std::vector<SweepRow>& rows,
                 const std::vector<std::string>& labels, const ordered_json& config,
                 bool axis_accuracy, const SuiteArgs& s, std::ostream& out) {
  const std::string csv = ReportsCsv(rows, config.dump(), axis_accuracy, labels);
  ordered_json doc;
  doc["config"] = config;
  doc["rows"] = ordered_json::array();
  for (size_t i = 0; i < rows.size(); ++i) {
    ordered_json row;
    row["label"] = i < labels.size() ? labels[i] : "";
    if (std::isnan(rows[i].axis_value)) {
      row["axis_value"] = "pooled";
    } else {
      row["axis_value"] = rows[i].axis_value;
    }
    row["report"] = ordered_json::parse(rows[i].report.ToJson());
    doc["rows"].push_back(row);
  }
  if (!s.out_csv.empty()) WriteText(s.out_csv, csv);
  if (!s.out_json.empty()) WriteText(s.out_json, doc.dump(2) + "\n");
  if (s.out_csv.empty()) out << csv;
}

int CmdEval(RunConfig& c, const SuiteArgs& s, std::ostream& out) {
  const auto geom = ResolveGeometry(c.geometry_path);
  const auto cfg = ToEvalConfig(c, geom);
  if (c.priors.empty()) c.priors = {"none"};
  std::vector<PriorPolicy> policies;
  for (const auto& p : c.priors) policies.push_back(ParsePriorSpec(p));

  const SuiteConfig suite = ToSuite(s, c);
  const bool synthetic = s.scenes.empty();
  const auto scenes = synthetic ? BuildSyntheticSuite(suite, geom, cfg.jobs)
                                : LoadSceneFiles(s.scenes);

  std::vector<SweepRow> rows;
  std::vector<std::string> labels;
  for (size_t p = 0; p < policies.size(); ++p) {
    if (s.pool_snr || !synthetic) {
      rows.push_back({std::numeric_limits<double>::quiet_NaN(),
                      RunEval(scenes, geom, cfg, policies[p])});
      labels.push_back(c.priors[p]);
      continue;
    }
    for (double snr : suite.snrs_db) {
      std::vector<EvalScene> subset;
      for (const auto& e : scenes) {
        if (e.snr_db == snr) subset.push_back(e);
      }
      rows.push_back({snr, RunEval(subset, geom, cfg, policies[p])});
      labels.push_back(c.priors[p]);
    }
  }
  auto config = ConfigJson(c, geom);
  config["pool_snr"] = s.pool_snr;
  if (synthetic) {
    config["suite"] = ordered_json::parse(suite.ToJson());
  } else {
    config["scenes"] = s.scenes;
  }
  EmitReports(rows, labels, config, false, s, out);
  return kExitOk;
}

int CmdSweep(RunConfig& c, const SuiteArgs& s, const std::string& axis_name,
             const std::vector<double>& values, std::ostream& out) {
  const auto geom = ResolveGeometry(c.geometry_path);
  const auto cfg = ToEvalConfig(c, geom);
  const SweepAxis axis = ParseSweepAxis(axis_name);
  if (values.empty()) throw ConfigError("--values must not be empty");
  if (c.priors.size() > 1) throw ConfigError("sweep takes at most one --prior");
  const PriorPolicy prior =
      c.priors.empty() ? PriorPolicy::None() : ParsePriorSpec(c.priors[0]);
  const SuiteConfig suite = ToSuite(s, c);
  const auto rows = RunSweep(axis, values, suite, geom, cfg, prior);

  auto config = ConfigJson(c, geom);
  config["axis"] = SweepAxisName(axis);
  config["values"] = values;
  config["suite"] = ordered_json::parse(suite.ToJson());
  EmitReports(rows, {}, config, axis == SweepAxis::kBinWidth, s, out);
  return kExitOk;
}

}  // namespace

int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err) {
  CLI::App app{"Direction-of-arrival estimation with static angular priors", "doa"};
  app.require_subcommand(1);
  RunConfig c;
  std::optional<uint64_t> seed;

  // simulate
  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "synthesize a scene");
  simulate->add_option("--angle", sim.angle, "source azimuth (deg)")->required();
  simulate->add_option("--snr", sim.snrs, "SNR in dB; repeat for several variants");
  simulate->add_option("--duration", sim.duration, "seconds")->capture_default_str();
  simulate->add_option("--seed", seed, "RNG seed (fallback DOA_SEED, then 0)");
  simulate->add_option("--out", sim.out, "output WAV")->required();
  simulate->add_option("--truth", sim.truth, "output truth JSON")->required();
  simulate->add_option("--geometry", c.geometry_path, "geometry JSON");
  simulate->add_option("--reflector-angle", sim.reflector_angle,
                       "add a coherent reflected copy from this azimuth (deg)");
  simulate->add_option("--reflector-delay-ms", sim.reflector_delay_ms)
      ->capture_default_str();
  simulate->add_option("--reflector-gain", sim.reflector_gain)->capture_default_str();
  simulate->add_option("--format", sim.format, "float32 or pcm16")
      ->check(CLI::IsMember({"float32", "pcm16"}))
      ->capture_default_str();

  // prior expert|visual
  auto* prior = app.add_subcommand("prior", "build an angular prior");
  prior->require_subcommand(1);
  std::vector<std::string> free_arcs;
  std::string expert_out;
  auto* expert = prior->add_subcommand("expert", "prior from free arcs");
  expert->add_option("--free", free_arcs, "free arc start:end in degrees (repeatable)")
      ->required();
  expert->add_option("--out", expert_out, "output prior JSON")->required();
  VisualArgs vis;
  auto* visual = prior->add_subcommand("visual", "prior from segmentation stats");
  visual->add_option("--segstats", vis.segstats, "per-heading class fractions JSON")
      ->required();
  visual->add_option("--thresholds", vis.thresholds, "threshold config JSON");
  visual->add_option("--free-rule", vis.rule, "any, all or sum (overrides file)");
  visual->add_option("--out", vis.out, "output prior JSON")->required();
  visual->add_option("--log", vis.log, "per-frame decision CSV");
  visual->add_flag("--strict-coverage", vis.strict_coverage,
                   "fail on heading gaps wider than the frustum");

  // estimate
  std::string input, estimate_out;
  auto* estimate = app.add_subcommand("estimate", "per-frame DoA for a WAV file");
  estimate->add_option("--input", input, "multichannel WAV")->required();
  estimate->add_option("--out", estimate_out, "CSV path (default stdout)");
  estimate->add_option("--prior", c.priors, "prior JSON file");
  AddAnalysisOptions(estimate, c);

  // eval
  SuiteArgs eval_args;
  auto* eval = app.add_subcommand("eval", "score scenes against ground truth");
  AddAnalysisOptions(eval, c);
  AddSuiteOptions(eval, eval_args);
  eval->add_option("--scene", eval_args.scenes,
                   "<wav>:<truth.json> (repeatable; default synthetic suite)");
  eval->add_option("--prior", c.priors,
                   "none | expert:<width> | file:<path> | visual:<path> "
                   "(repeatable, one report row each)");
  eval->add_flag("--pool-snr", eval_args.pool_snr,
                 "pool frames across the SNR grid instead of one row per level");
  eval->add_option("--seed", seed, "seed when --seeds is absent");

  // sweep
  SuiteArgs sweep_args;
  std::string axis;
  std::vector<double> values;
  auto* sweep = app.add_subcommand("sweep", "parameter sweep on the synthetic suite");
  AddAnalysisOptions(sweep, c);
  AddSuiteOptions(sweep, sweep_args);
  sweep->add_option("--axis", axis, "window, bin_width, prior_width or snr")->required();
  sweep->add_option("--values", values, "axis values")->delimiter(',')->required();
  sweep->add_option("--prior", c.priors, "base prior for non-prior axes");
  sweep->add_option("--seed", seed, "seed when --seeds is absent");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    if (app.get_subcommands().empty()) err << app.help();
    return kExitUsage;
  }

  try {
    c.seed = seed ? seed : EnvSeed();
    if (simulate->parsed()) {
      c.subcommand = "simulate";
      return CmdSimulate(c, sim, out);
    }
    if (expert->parsed()) {
      c.subcommand = "prior expert";
      return CmdPriorExpert(c, free_arcs, expert_out, out);
    }
    if (visual->parsed()) {
      c.subcommand = "prior visual";
      return CmdPriorVisual(c, vis, out, err);
    }
    if (estimate->parsed()) {
      c.subcommand = "estimate";
      return CmdEstimate(c, input, estimate_out, out);
    }
    if (eval->parsed()) {
      c.subcommand = "eval";
      return CmdEval(c, eval_args, out);
    }
    if (sweep->parsed()) {
      c.subcommand = "sweep";
      return CmdSweep(c, sweep_args, axis, values, out);
    }
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DataError& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace doa::cli
