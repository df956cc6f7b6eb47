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

#ifndef DOA_GEOMETRY_H_
#define DOA_GEOMETRY_H_

#include <complex>
#include <filesystem>
#include <string>
#include <vector>

namespace doa {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kDefaultSpeedOfSound = 343.0;
inline constexpr int kDefaultSampleRate = 16000;

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

inline double DegToRad(double deg) { return deg * kPi / 180.0; }
inline double RadToDeg(double rad) { return rad * 180.0 / kPi; }

// Planar microphone array. Positions are in meters relative to the array
// center. Immutable once constructed.
class MicArrayGeometry {
 public:
  // Throws ConfigError if fewer than two mics, duplicated positions, or
  // non-positive rate / speed of sound.
  MicArrayGeometry(std::vector<Point2> mic_positions, int sample_rate_hz,
                   double speed_of_sound = kDefaultSpeedOfSound);

  // m mics on a circle of `radius`, mic k at angle offset + 2*pi*k/m.
  static MicArrayGeometry Circular(int m, double radius, double offset_rad,
                                   int sample_rate_hz,
                                   double speed_of_sound = kDefaultSpeedOfSound);

  // {"mics": [[x,y],...], "sample_rate_hz": n, "speed_of_sound": c}
  static MicArrayGeometry FromJson(const std::string& text);
  static MicArrayGeometry Load(const std::filesystem::path& path);
  std::string ToJson() const;

  int num_mics() const { return static_cast<int>(mics_.size()); }
  const std::vector<Point2>& mic_positions() const { return mics_; }
  int sample_rate_hz() const { return sample_rate_hz_; }
  double speed_of_sound() const { return speed_of_sound_; }

  // Largest pairwise mic distance.
  double Aperture() const;

 private:
  std::vector<Point2> mics_;
  int sample_rate_hz_;
  double speed_of_sound_;
};

// The array used for the synthetic benchmark: 4 mics, 28.3 mm radius, 16 kHz.
MicArrayGeometry DefaultBenchmarkArray();

// Far-field arrival delays in seconds for a plane wave arriving from
// `azimuth_rad`: delay_m = -(p_m . u) / c. Only differences are meaningful.
std::vector<double> TdoaForAngle(const MicArrayGeometry& geom,
                                 double azimuth_rad);

// a_m = exp(-j 2 pi f delay_m). Throws ConfigError unless
// 0 < freq_hz <= fs / 2.
std::vector<std::complex<double>> SteeringVector(const MicArrayGeometry& geom,
                                                 double azimuth_rad,
                                                 double freq_hz);

}  // namespace doa

#endif  // DOA_GEOMETRY_H_
