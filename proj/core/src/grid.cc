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

#include "doa/grid.h"

#include <cmath>

#include "doa/error.h"
#include "doa/geometry.h"

namespace doa {

AngularGrid AngularGrid::Uniform(int bins) {
  if (bins < 1) throw ConfigError("grid needs at least one bin");
  std::vector<double> deg(bins);
  for (int i = 0; i < bins; ++i) deg[i] = 360.0 * i / bins;
  return AngularGrid(std::move(deg), 360.0 / bins);
}

AngularGrid::AngularGrid(std::vector<double> degrees, double resolution_deg)
    : degrees_(std::move(degrees)), resolution_deg_(resolution_deg) {
  for (size_t i = 0; i < degrees_.size(); ++i) {
    if (!(degrees_[i] >= 0.0 && degrees_[i] < 360.0)) {
      throw ConfigError("grid angles must lie in [0, 360)");
    }
    if (i > 0 && !(degrees_[i] > degrees_[i - 1])) {
      throw ConfigError("grid angles must be strictly increasing");
    }
  }
}

double AngularGrid::rad(int i) const { return DegToRad(degrees_[i]); }

}  // namespace doa
