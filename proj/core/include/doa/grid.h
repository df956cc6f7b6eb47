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

#ifndef DOA_GRID_H_
#define DOA_GRID_H_

#include <vector>

namespace doa {

// Ordered candidate azimuths in [0, 360). Angles are kept in degrees so that
// prior boundaries compare exactly against grid points.
class AngularGrid {
 public:
  // bins uniform angles i * 360 / bins. Throws ConfigError if bins < 1.
  static AngularGrid Uniform(int bins);

  // Throws ConfigError unless strictly increasing within [0, 360).
  AngularGrid(std::vector<double> degrees, double resolution_deg);

  int size() const { return static_cast<int>(degrees_.size()); }
  bool empty() const { return degrees_.empty(); }
  const std::vector<double>& degrees() const { return degrees_; }
  double deg(int i) const { return degrees_[i]; }
  double rad(int i) const;
  double resolution_deg() const { return resolution_deg_; }

  friend bool operator==(const AngularGrid&, const AngularGrid&) = default;

 private:
  std::vector<double> degrees_;
  double resolution_deg_;
};

inline constexpr int kDefaultGridBins = 180;

}  // namespace doa

#endif  // DOA_GRID_H_
