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

#include "doa/geometry.h"

#include <cmath>
#include <fstream>
#include <sstream>

#include "doa/error.h"
#include "json.hpp"

namespace doa {

MicArrayGeometry::MicArrayGeometry(std::vector<Point2> mic_positions,
                                   int sample_rate_hz, double speed_of_sound)
    : mics_(std::move(mic_positions)),
      sample_rate_hz_(sample_rate_hz),
      speed_of_sound_(speed_of_sound) {
  if (mics_.size() < 2) {
    throw ConfigError("geometry needs at least 2 microphones");
  }
  if (sample_rate_hz_ <= 0) throw ConfigError("sample rate must be positive");
  if (!(speed_of_sound_ > 0.0) || !std::isfinite(speed_of_sound_)) {
    throw ConfigError("speed of sound must be positive");
  }
  for (size_t i = 0; i < mics_.size(); ++i) {
    if (!std::isfinite(mics_[i].x) || !std::isfinite(mics_[i].y)) {
      throw ConfigError("mic position is not finite");
    }
    for (size_t j = i + 1; j < mics_.size(); ++j) {
      if (mics_[i] == mics_[j]) {
        throw ConfigError("mics " + std::to_string(i) + " and " +
                          std::to_string(j) + " share a position");
      }
    }
  }
}

MicArrayGeometry MicArrayGeometry::Circular(int m, double radius,
                                            double offset_rad,
                                            int sample_rate_hz,
                                            double speed_of_sound) {
  if (m < 2) throw ConfigError("circular array needs m >= 2");
  if (!(radius > 0.0)) throw ConfigError("circular array needs radius > 0");
  std::vector<Point2> mics;
  mics.reserve(m);
  for (int k = 0; k < m; ++k) {
    const double a = offset_rad + 2.0 * kPi * k / m;
    mics.push_back({radius * std::cos(a), radius * std::sin(a)});
  }
  return MicArrayGeometry(std::move(mics), sample_rate_hz, speed_of_sound);
}

MicArrayGeometry MicArrayGeometry::FromJson(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("geometry JSON: ") + e.what());
  }
  try {
    std::vector<Point2> mics;
    for (const auto& p : doc.at("mics")) {
      if (!p.is_array() || p.size() != 2) {
        throw ConfigError("geometry JSON: each mic must be [x, y]");
      }
      mics.push_back({p[0].get<double>(), p[1].get<double>()});
    }
    const int fs = doc.value("sample_rate_hz", kDefaultSampleRate);
    const double c = doc.value("speed_of_sound", kDefaultSpeedOfSound);
    return MicArrayGeometry(std::move(mics), fs, c);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("geometry JSON: ") + e.what());
  }
}

MicArrayGeometry MicArrayGeometry::Load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open geometry file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return FromJson(ss.str());
}

std::string MicArrayGeometry::ToJson() const {
  nlohmann::json doc;
  doc["mics"] = nlohmann::json::array();
  for (const auto& p : mics_) doc["mics"].push_back({p.x, p.y});
  doc["sample_rate_hz"] = sample_rate_hz_;
  doc["speed_of_sound"] = speed_of_sound_;
  return doc.dump();
}

double MicArrayGeometry::Aperture() const {
  double best = 0.0;
  for (size_t i = 0; i < mics_.size(); ++i) {
    for (size_t j = i + 1; j < mics_.size(); ++j) {
      best = std::max(best, std::hypot(mics_[i].x - mics_[j].x,
                                       mics_[i].y - mics_[j].y));
    }
  }
  return best;
}

MicArrayGeometry DefaultBenchmarkArray() {
  return MicArrayGeometry::Circular(4, 0.0283, 0.0, kDefaultSampleRate);
}

std::vector<double> TdoaForAngle(const MicArrayGeometry& geom,
                                 double azimuth_rad) {
  const double ux = std::cos(azimuth_rad);
  const double uy = std::sin(azimuth_rad);
  std::vector<double> delays;
  delays.reserve(geom.num_mics());
  for (const auto& p : geom.mic_positions()) {
    delays.push_back(-(p.x * ux + p.y * uy) / geom.speed_of_sound());
  }
  return delays;
}

std::vector<std::complex<double>> SteeringVector(const MicArrayGeometry& geom,
                                                 double azimuth_rad,
                                                 double freq_hz) {
  if (!(freq_hz > 0.0) || freq_hz > geom.sample_rate_hz() / 2.0) {
    throw ConfigError("steering frequency outside (0, fs/2]");
  }
  const auto delays = TdoaForAngle(geom, azimuth_rad);
  std::vector<std::complex<double>> a;
  a.reserve(delays.size());
  for (double d : delays) a.push_back(std::polar(1.0, -2.0 * kPi * freq_hz * d));
  return a;
}

}  // namespace doa
