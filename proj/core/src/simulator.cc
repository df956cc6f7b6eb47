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

#include "doa/simulator.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "doa/error.h"
#include "json.hpp"

namespace doa {
namespace {

// Distinct stream tags so source and per-channel noise never share a state.
constexpr uint32_t kSourceStream = 0x53524331;  // "SRC1"
constexpr uint32_t kNoiseStream = 0x4e4f4953;   // "NOIS"

std::mt19937_64 MakeRng(uint64_t seed, uint32_t stream, uint32_t index) {
  std::seed_seq seq{static_cast<uint32_t>(seed), static_cast<uint32_t>(seed >> 32),
                    stream, index};
  return std::mt19937_64(seq);
}

double MeanSquare(const std::vector<double>& x) {
  if (x.empty()) return 0.0;
  double s = 0.0;
  for (double v : x) s += v * v;
  return s / static_cast<double>(x.size());
}

}  // namespace

void SceneSpec::Validate() const {
  if (!(duration_s > 0.0)) throw ConfigError("scene duration must be > 0");
  if (!std::isfinite(true_azimuth_deg)) throw ConfigError("azimuth not finite");
  for (double snr : snr_db) {
    if (!std::isfinite(snr)) throw ConfigError("SNR must be finite");
  }
  if (reflector) {
    if (!(reflector->gain > 0.0 && reflector->gain <= 1.0)) {
      throw ConfigError("reflector gain must lie in (0, 1]");
    }
    if (!(reflector->delay_ms >= 0.0)) {
      throw ConfigError("reflector delay must be >= 0");
    }
  }
}

std::string SceneSpec::ToJson() const {
  nlohmann::json doc;
  doc["true_azimuth_deg"] = true_azimuth_deg;
  doc["snr_db"] = snr_db;
  doc["duration_s"] = duration_s;
  doc["seed"] = seed;
  if (reflector) {
    doc["reflector"] = {{"azimuth_deg", reflector->azimuth_deg},
                        {"delay_ms", reflector->delay_ms},
                        {"gain", reflector->gain}};
  } else {
    doc["reflector"] = nullptr;
  }
  return doc.dump();
}

uint64_t SceneSpec::Hash() const {
  uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : ToJson()) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::vector<double> GenerateSource(double duration_s, int sample_rate_hz,
                                   uint64_t seed) {
  if (!(duration_s > 0.0)) throw ConfigError("source duration must be > 0");
  const auto n = static_cast<size_t>(std::llround(duration_s * sample_rate_hz));
  auto rng = MakeRng(seed, kSourceStream, 0);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> x(n);
  for (auto& v : x) v = normal(rng);
  return x;
}

MultichannelAudio SynthMultichannel(std::span<const double> source,
                                    const MicArrayGeometry& geom,
                                    double azimuth_deg) {
  const auto tau = TdoaForAngle(geom, DegToRad(azimuth_deg));
  const double first = *std::min_element(tau.begin(), tau.end());
  MultichannelAudio out;
  out.sample_rate_hz = geom.sample_rate_hz();
  for (double t : tau) {
    out.channels.push_back(
        FractionalDelay(source, (t - first) * geom.sample_rate_hz()));
  }
  return out;
}

MultichannelAudio AddNoiseSnr(const MultichannelAudio& clean, double snr_db,
                              uint64_t seed) {
  if (!std::isfinite(snr_db)) throw ConfigError("SNR must be finite");
  clean.Validate();
  MultichannelAudio out = clean;
  const double ratio = std::pow(10.0, snr_db / 10.0);
  for (int m = 0; m < out.num_channels(); ++m) {
    auto& ch = out.channels[m];
    const double sigma = std::sqrt(MeanSquare(ch) / ratio);
    auto rng = MakeRng(seed, kNoiseStream, static_cast<uint32_t>(m));
    std::normal_distribution<double> normal(0.0, sigma);
    for (auto& v : ch) v += normal(rng);
  }
  return out;
}

Scene SynthScene(const SceneSpec& spec, const MicArrayGeometry& geom) {
  spec.Validate();
  const int fs = geom.sample_rate_hz();
  const auto source = GenerateSource(spec.duration_s, fs, spec.seed);

  Scene scene;
  scene.clean = SynthMultichannel(source, geom, spec.true_azimuth_deg);
  if (spec.reflector) {
    const auto& r = *spec.reflector;
    auto copy = FractionalDelay(source, r.delay_ms * 1e-3 * fs);
    for (auto& v : copy) v *= r.gain;
    const auto echo = SynthMultichannel(copy, geom, r.azimuth_deg);
    for (int m = 0; m < scene.clean.num_channels(); ++m) {
      for (size_t t = 0; t < source.size(); ++t) {
        scene.clean.channels[m][t] += echo.channels[m][t];
      }
    }
  }
  for (double snr : spec.snr_db) {
    scene.noisy.push_back(AddNoiseSnr(scene.clean, snr, spec.seed));
  }
  scene.truth.azimuth_deg = spec.true_azimuth_deg;
  scene.truth.spec_hash = spec.Hash();
  scene.truth.spec_json = spec.ToJson();
  return scene;
}

std::string TruthToJson(const GroundTruth& truth) {
  nlohmann::json doc;
  doc["azimuth_deg"] = truth.azimuth_deg;
  doc["spec"] = nlohmann::json::parse(truth.spec_json);
  char hash[17];
  std::snprintf(hash, sizeof(hash), "%016llx",
                static_cast<unsigned long long>(truth.spec_hash));
  doc["spec_hash"] = hash;
  return doc.dump(2);
}

double ReadTruthAzimuth(const std::string& json_text) {
  try {
    return nlohmann::json::parse(json_text).at("azimuth_deg").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("truth JSON: ") + e.what());
  }
}

}  // namespace doa
