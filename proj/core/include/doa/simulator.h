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

#ifndef DOA_SIMULATOR_H_
#define DOA_SIMULATOR_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "doa/dsp.h"
#include "doa/geometry.h"

namespace doa {

// A gain-scaled, delayed coherent copy of the source arriving from another
// direction, standing in for a reflecting surface.
struct Reflector {
  double azimuth_deg = 0.0;
  double delay_ms = 0.0;
  double gain = 1.0;
};

struct SceneSpec {
  double true_azimuth_deg = 0.0;
  // One noisy variant per entry; empty means clean output only.
  std::vector<double> snr_db;
  double duration_s = 3.0;
  uint64_t seed = 0;
  std::optional<Reflector> reflector;

  // Throws ConfigError on duration <= 0, gain outside (0, 1], negative
  // reflector delay or non-finite SNR.
  void Validate() const;
  std::string ToJson() const;
  // FNV-1a over ToJson().
  uint64_t Hash() const;
};

// i.i.d. standard normal samples, deterministic per seed.
std::vector<double> GenerateSource(double duration_s, int sample_rate_hz,
                                   uint64_t seed);

// Channel m = FractionalDelay(source, (tau_m - min tau) * fs).
MultichannelAudio SynthMultichannel(std::span<const double> source,
                                    const MicArrayGeometry& geom,
                                    double azimuth_deg);

// Independent Gaussian noise per channel with power = channel power /
// 10^(snr_db / 10). Each channel draws from its own sub-seed.
MultichannelAudio AddNoiseSnr(const MultichannelAudio& clean, double snr_db,
                              uint64_t seed);

struct GroundTruth {
  double azimuth_deg = 0.0;
  uint64_t spec_hash = 0;
  std::string spec_json;
};

struct Scene {
  MultichannelAudio clean;
  // Parallel to spec.snr_db.
  std::vector<MultichannelAudio> noisy;
  GroundTruth truth;
};

Scene SynthScene(const SceneSpec& spec, const MicArrayGeometry& geom);

// Truth file: {"azimuth_deg": a, "spec": {...}, ...}.
std::string TruthToJson(const GroundTruth& truth);
double ReadTruthAzimuth(const std::string& json_text);

}  // namespace doa

#endif  // DOA_SIMULATOR_H_
