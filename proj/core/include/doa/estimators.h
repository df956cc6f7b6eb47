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

#ifndef DOA_ESTIMATORS_H_
#define DOA_ESTIMATORS_H_

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "doa/dsp.h"
#include "doa/geometry.h"
#include "doa/grid.h"
#include "doa/prior.h"

namespace doa {

enum class Method { kSrpPhat, kMusic, kTops, kGccPair };

// Accepts "srp-phat", "music", "tops", "gcc-pair".
Method ParseMethod(const std::string& name);
const char* MethodName(Method method);

struct EstimatorOptions {
  Method method = Method::kSrpPhat;
  int num_sources = 1;
  // TOPS: project transformed signal subspaces off a(phi, f_i).
  bool tops_projection = true;
  // Mic pair used by Method::kGccPair.
  int pair_i = 0;
  int pair_j = 1;
  // Parabolic sub-bin refinement of the argmax.
  bool refine_peak = false;
};

// Snapshot length the estimator works best with when none is configured:
// whole-frame DFT for the PHAT methods, 16 ms snapshots for the subspace
// methods (they need several snapshots per frame).
int DefaultSnapshotLen(Method method, int sample_rate_hz);

// ---------------------------------------------------------------------------
// GCC-PHAT

// PHAT-weighted cross spectrum of channels i and j on the band bins.
// Snapshots are summed before weighting; bins whose cross-power magnitude is
// below 1e-12 get zero weight.
class GccPhat {
 public:
  GccPhat(const FrameSpectra& spectra, int i, int j);

  // Correlation at a real-valued lag (samples). Positive lag means channel j
  // lags channel i. Normalized by the band bin count, so identical channels
  // give 1 at lag 0.
  double At(double lag_samples) const;

  // Values at integer lags, index (lag mod fft_size), via inverse FFT.
  std::vector<double> IntegerLags() const;
  double AtInteger(int lag) const;

  // Best integer lag within |lag| <= max_lag; with `refine`, a golden-section
  // search of At() around it.
  double PeakLag(int max_lag, bool refine) const;

  int fft_size() const { return fft_size_; }

 private:
  int fft_size_;
  BinRange band_;
  std::vector<std::complex<double>> weighted_;  // one per band bin
};

// ---------------------------------------------------------------------------
// Grid scoring

// Per-frame score function over azimuth. Higher is more likely.
class FrameScorer {
 public:
  virtual ~FrameScorer() = default;
  virtual double Score(double azimuth_rad) const = 0;
};

std::unique_ptr<FrameScorer> MakeSrpPhatScorer(const FrameSpectra& spectra,
                                               const MicArrayGeometry& geom);
std::unique_ptr<FrameScorer> MakeMusicScorer(const FrameSpectra& spectra,
                                             const MicArrayGeometry& geom,
                                             int num_sources);
std::unique_ptr<FrameScorer> MakeTopsScorer(const FrameSpectra& spectra,
                                            const MicArrayGeometry& geom,
                                            int num_sources, bool projection);
std::unique_ptr<FrameScorer> MakeGccPairScorer(const FrameSpectra& spectra,
                                               const MicArrayGeometry& geom,
                                               int i, int j);
// Dispatches on options.method. Throws ConfigError for invalid num_sources or
// mic pair.
std::unique_ptr<FrameScorer> MakeScorer(const FrameSpectra& spectra,
                                        const MicArrayGeometry& geom,
                                        const EstimatorOptions& options);

// Mean over pairs and band bins of Re{G_ij(f) exp(j 2 pi f (tau_i - tau_j))}.
double SrpPhatScore(const FrameSpectra& spectra, const MicArrayGeometry& geom,
                    double azimuth_rad);

// (1/K) sum_k x_k x_k^H. Throws ConfigError when empty.
Eigen::MatrixXcd SpatialCovariance(std::span<const Eigen::VectorXcd> snapshots);
// Covariance over the frame's snapshots at one bin.
Eigen::MatrixXcd SpatialCovariance(const FrameSpectra& spectra, int bin);

// Eigenvectors of the M - num_sources smallest eigenvalues (ascending, index
// order on ties).
Eigen::MatrixXcd NoiseSubspace(const Eigen::MatrixXcd& covariance,
                               int num_sources);

// Smallest singular value of the stacked TOPS test matrix D(phi).
double TopsSigmaMin(const FrameSpectra& spectra, const MicArrayGeometry& geom,
                    double azimuth_rad, int num_sources, bool projection);

struct ScoreSpectrum {
  Method method = Method::kSrpPhat;
  int frame_index = 0;
  std::vector<double> angles_deg;
  std::vector<double> scores;
};

ScoreSpectrum ScanScores(const FrameScorer& scorer, const AngularGrid& grid,
                         Method method, int frame_index);
ScoreSpectrum MusicSpectrum(const FrameSpectra& spectra,
                            const MicArrayGeometry& geom,
                            const AngularGrid& restricted_grid,
                            int num_sources);
ScoreSpectrum TopsSpectrum(const FrameSpectra& spectra,
                           const MicArrayGeometry& geom,
                           const AngularGrid& restricted_grid, int num_sources,
                           bool projection = true);

// ---------------------------------------------------------------------------
// Prior-restricted argmax

struct DoaEstimate {
  int frame_index = 0;
  double azimuth_deg = 0.0;
  double score = 0.0;
  bool vad_active = true;
  // Number of score_fn calls; equals |G'|.
  int evaluations = 0;
};

using ScoreFn = std::function<double(double azimuth_rad)>;

// argmax of score_fn over G' = MaskGrid(grid, prior). Ties go to the smallest
// angle. Throws EmptySearchSpaceError if the prior obstructs every angle.
DoaEstimate ArgmaxWithPrior(const ScoreFn& score_fn, const AngularGrid& grid,
                            const PriorMap& prior, bool refine_peak = false);

// Builds the scorer for `spectra` and runs ArgmaxWithPrior. Inactive frames
// are still estimated; the flag is carried through.
DoaEstimate EstimateFrame(const FrameSpectra& spectra,
                          const MicArrayGeometry& geom, const AngularGrid& grid,
                          const PriorMap& prior,
                          const EstimatorOptions& options);

}  // namespace doa

#endif  // DOA_ESTIMATORS_H_
