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

#include <algorithm>
#include <cmath>
#include <limits>

#include "doa/error.h"
#include "doa/estimators.h"

namespace doa {

Method ParseMethod(const std::string& name) {
  if (name == "srp-phat") return Method::kSrpPhat;
  if (name == "music") return Method::kMusic;
  if (name == "tops") return Method::kTops;
  if (name == "gcc-pair") return Method::kGccPair;
  throw ConfigError("unknown method '" + name +
                    "' (expected srp-phat, music, tops or gcc-pair)");
}

const char* MethodName(Method method) {
  switch (method) {
    case Method::kMusic:
      return "music";
    case Method::kTops:
      return "tops";
    case Method::kGccPair:
      return "gcc-pair";
    case Method::kSrpPhat:
      break;
  }
  return "srp-phat";
}

int DefaultSnapshotLen(Method method, int sample_rate_hz) {
  switch (method) {
    case Method::kMusic:
    case Method::kTops:
      return MsToSamples(16.0, sample_rate_hz);
    case Method::kSrpPhat:
    case Method::kGccPair:
      break;
  }
  return 0;
}

std::unique_ptr<FrameScorer> MakeScorer(const FrameSpectra& spectra,
                                        const MicArrayGeometry& geom,
                                        const EstimatorOptions& options) {
  switch (options.method) {
    case Method::kSrpPhat:
      return MakeSrpPhatScorer(spectra, geom);
    case Method::kMusic:
      return MakeMusicScorer(spectra, geom, options.num_sources);
    case Method::kTops:
      return MakeTopsScorer(spectra, geom, options.num_sources,
                            options.tops_projection);
    case Method::kGccPair:
      return MakeGccPairScorer(spectra, geom, options.pair_i, options.pair_j);
  }
  throw ConfigError("unknown method");
}

ScoreSpectrum ScanScores(const FrameScorer& scorer, const AngularGrid& grid,
                         Method method, int frame_index) {
  ScoreSpectrum out;
  out.method = method;
  out.frame_index = frame_index;
  out.angles_deg = grid.degrees();
  out.scores.reserve(grid.size());
  for (int i = 0; i < grid.size(); ++i) out.scores.push_back(scorer.Score(grid.rad(i)));
  return out;
}

DoaEstimate ArgmaxWithPrior(const ScoreFn& score_fn, const AngularGrid& grid,
                            const PriorMap& prior, bool refine_peak) {
  const AngularGrid restricted = MaskGrid(grid, prior);
  std::vector<double> scores(restricted.size());
  int best = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < restricted.size(); ++i) {
    double s = score_fn(restricted.rad(i));
    if (std::isnan(s)) s = -std::numeric_limits<double>::infinity();
    scores[i] = s;
    // Strict comparison keeps the smallest angle on ties.
    if (s > best_score || i == 0) {
      best = i;
      best_score = s;
    }
  }

  DoaEstimate est;
  est.azimuth_deg = restricted.deg(best);
  est.score = best_score;
  est.evaluations = restricted.size();

  if (refine_peak && restricted.size() >= 3) {
    const int n = restricted.size();
    const int prev = (best + n - 1) % n;
    const int next = (best + 1) % n;
    const double res = grid.resolution_deg();
    auto gap = [](double a, double b) {
      double d = std::fmod(b - a + 360.0, 360.0);
      return d;
    };
    if (std::abs(gap(restricted.deg(prev), restricted.deg(best)) - res) < 1e-9 &&
        std::abs(gap(restricted.deg(best), restricted.deg(next)) - res) < 1e-9) {
      const double lo = scores[prev], hi = scores[next];
      const double denom = lo - 2.0 * best_score + hi;
      if (denom < 0.0) {
        const double offset = std::clamp(0.5 * (lo - hi) / denom, -0.5, 0.5);
        est.azimuth_deg = std::fmod(est.azimuth_deg + offset * res + 360.0, 360.0);
      }
    }
  }
  return est;
}

DoaEstimate EstimateFrame(const FrameSpectra& spectra,
                          const MicArrayGeometry& geom, const AngularGrid& grid,
                          const PriorMap& prior,
                          const EstimatorOptions& options) {
  const auto scorer = MakeScorer(spectra, geom, options);
  auto est = ArgmaxWithPrior(
      [&](double rad) { return scorer->Score(rad); }, grid, prior,
      options.refine_peak);
  est.frame_index = spectra.frame_index;
  est.vad_active = spectra.vad_active;
  return est;
}

}  // namespace doa
