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

#include <cmath>
#include <memory>

#include "doa/error.h"
#include "doa/estimators.h"

namespace doa {
namespace {

// Mean over mic pairs of the pair's GCC-PHAT read at the hypothesized lag.
class SrpPhatScorer : public FrameScorer {
 public:
  SrpPhatScorer(const FrameSpectra& spectra, const MicArrayGeometry& geom)
      : geom_(geom), fs_(spectra.sample_rate_hz) {
    const int m = spectra.num_channels();
    if (m < 2) throw ConfigError("SRP-PHAT needs at least two channels");
    if (m != geom.num_mics()) {
      throw ConfigError("spectra channel count does not match the geometry");
    }
    for (int i = 0; i < m; ++i) {
      for (int j = i + 1; j < m; ++j) {
        pairs_.push_back({i, j, GccPhat(spectra, i, j)});
      }
    }
  }

  double Score(double azimuth_rad) const override {
    const auto tau = TdoaForAngle(geom_, azimuth_rad);
    double sum = 0.0;
    for (const auto& p : pairs_) {
      sum += p.gcc.At((tau[p.j] - tau[p.i]) * fs_);
    }
    return sum / static_cast<double>(pairs_.size());
  }

 private:
  struct Pair {
    int i;
    int j;
    GccPhat gcc;
  };
  MicArrayGeometry geom_;
  double fs_;
  std::vector<Pair> pairs_;
};

class GccPairScorer : public FrameScorer {
 public:
  GccPairScorer(const FrameSpectra& spectra, const MicArrayGeometry& geom,
                int i, int j)
      : geom_(geom), fs_(spectra.sample_rate_hz), i_(i), j_(j),
        gcc_(spectra, i, j) {
    if (i == j) throw ConfigError("GCC pair needs two distinct mics");
  }

  double Score(double azimuth_rad) const override {
    const auto tau = TdoaForAngle(geom_, azimuth_rad);
    // A single pair cannot tell an angle from its mirror image about the pair
    // axis. Snapping the lag makes both read the same value, so the argmax
    // tie rule decides instead of rounding noise.
    const double lag = std::round((tau[j_] - tau[i_]) * fs_ * 1e9) * 1e-9;
    return gcc_.At(lag);
  }

 private:
  MicArrayGeometry geom_;
  double fs_;
  int i_;
  int j_;
  GccPhat gcc_;
};

}  // namespace

std::unique_ptr<FrameScorer> MakeSrpPhatScorer(const FrameSpectra& spectra,
                                               const MicArrayGeometry& geom) {
  return std::make_unique<SrpPhatScorer>(spectra, geom);
}

std::unique_ptr<FrameScorer> MakeGccPairScorer(const FrameSpectra& spectra,
                                               const MicArrayGeometry& geom,
                                               int i, int j) {
  return std::make_unique<GccPairScorer>(spectra, geom, i, j);
}

double SrpPhatScore(const FrameSpectra& spectra, const MicArrayGeometry& geom,
                    double azimuth_rad) {
  return SrpPhatScorer(spectra, geom).Score(azimuth_rad);
}

}  // namespace doa
