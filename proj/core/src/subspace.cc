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
#include <memory>

#include <Eigen/Eigenvalues>

#include "doa/error.h"
#include "doa/estimators.h"

namespace doa {
namespace {

constexpr double kMinProjection = 1e-300;
constexpr double kMinSigma = 1e-150;

void CheckSubspaceArgs(const FrameSpectra& spectra,
                       const MicArrayGeometry& geom, int num_sources) {
  const int m = spectra.num_channels();
  if (m != geom.num_mics()) {
    throw ConfigError("spectra channel count does not match the geometry");
  }
  if (num_sources < 1 || num_sources >= m) {
    throw ConfigError("num_sources must satisfy 1 <= P < M (P=" +
                      std::to_string(num_sources) +
                      ", M=" + std::to_string(m) + ")");
  }
  if (spectra.num_snapshots() < num_sources) {
    throw ConfigError("subspace methods need at least num_sources snapshots");
  }
}

Eigen::VectorXcd Steering(std::span<const double> tau, double freq_hz) {
  Eigen::VectorXcd a(tau.size());
  for (size_t m = 0; m < tau.size(); ++m) {
    a(m) = std::polar(1.0, -2.0 * kPi * freq_hz * tau[m]);
  }
  return a;
}

// Per-bin incoherent average of 1 / ||E_n^H a||^2.
class MusicScorer : public FrameScorer {
 public:
  MusicScorer(const FrameSpectra& spectra, const MicArrayGeometry& geom,
              int num_sources)
      : geom_(geom) {
    CheckSubspaceArgs(spectra, geom, num_sources);
    for (int k = spectra.band.lo; k <= spectra.band.hi; ++k) {
      freqs_.push_back(spectra.BinFrequency(k));
      noise_.push_back(NoiseSubspace(SpatialCovariance(spectra, k), num_sources));
    }
  }

  double Score(double azimuth_rad) const override {
    const auto tau = TdoaForAngle(geom_, azimuth_rad);
    double sum = 0.0;
    for (size_t b = 0; b < freqs_.size(); ++b) {
      const Eigen::VectorXcd a = Steering(tau, freqs_[b]);
      const double proj = (noise_[b].adjoint() * a).squaredNorm();
      sum += 1.0 / std::max(proj, kMinProjection);
    }
    return sum / static_cast<double>(freqs_.size());
  }

 private:
  MicArrayGeometry geom_;
  std::vector<double> freqs_;
  std::vector<Eigen::MatrixXcd> noise_;
};

class TopsScorerImpl : public FrameScorer {
 public:
  TopsScorerImpl(const FrameSpectra& spectra, const MicArrayGeometry& geom,
                 int num_sources, bool projection)
      : geom_(geom), num_sources_(num_sources), projection_(projection) {
    CheckSubspaceArgs(spectra, geom, num_sources);
    if (spectra.band.size() < 2) {
      throw ConfigError("TOPS needs a band of at least two bins");
    }
    const int m = spectra.num_channels();
    std::vector<Eigen::MatrixXcd> cov;
    int ref = 0;
    double ref_energy = -1.0;
    for (int k = spectra.band.lo; k <= spectra.band.hi; ++k) {
      cov.push_back(SpatialCovariance(spectra, k));
      const double energy = cov.back().trace().real() / m;
      if (energy > ref_energy) {
        ref_energy = energy;
        ref = static_cast<int>(cov.size()) - 1;
      }
    }
    ref_freq_ = spectra.BinFrequency(spectra.band.lo + ref);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(cov[ref]);
    signal_ = eig.eigenvectors().rightCols(num_sources);

    for (int b = 0; b < static_cast<int>(cov.size()); ++b) {
      if (b == ref) continue;
      freqs_.push_back(spectra.BinFrequency(spectra.band.lo + b));
      const Eigen::MatrixXcd w = NoiseSubspace(cov[b], num_sources);
      noise_.push_back(w);
    }
  }

  double Score(double azimuth_rad) const override {
    return 1.0 / std::max(SigmaMin(azimuth_rad), kMinSigma);
  }

  // Smallest singular value of D = [U_1^H W_1 | ... | U_K^H W_K], from the
  // P x P Gram matrix D D^H.
  double SigmaMin(double azimuth_rad) const {
    const auto tau = TdoaForAngle(geom_, azimuth_rad);
    const int m = geom_.num_mics();
    Eigen::MatrixXcd gram = Eigen::MatrixXcd::Zero(num_sources_, num_sources_);
    Eigen::MatrixXcd u(m, num_sources_);
    for (size_t b = 0; b < freqs_.size(); ++b) {
      const Eigen::VectorXcd phi = Steering(tau, freqs_[b] - ref_freq_);
      u = phi.asDiagonal() * signal_;
      if (projection_) {
        const Eigen::VectorXcd a = Steering(tau, freqs_[b]);
        u -= a * (a.adjoint() * u) / a.squaredNorm();
      }
      const Eigen::MatrixXcd block = u.adjoint() * noise_[b];
      gram.noalias() += block * block.adjoint();
    }
    if (num_sources_ == 1) return std::sqrt(std::max(gram(0, 0).real(), 0.0));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(gram,
                                                        Eigen::EigenvaluesOnly);
    return std::sqrt(std::max(eig.eigenvalues()(0), 0.0));
  }

 private:
  MicArrayGeometry geom_;
  int num_sources_;
  bool projection_;
  double ref_freq_ = 0.0;
  Eigen::MatrixXcd signal_;
  std::vector<double> freqs_;
  std::vector<Eigen::MatrixXcd> noise_;
};

}  // namespace

Eigen::MatrixXcd SpatialCovariance(std::span<const Eigen::VectorXcd> snapshots) {
  if (snapshots.empty()) throw ConfigError("covariance needs at least one snapshot");
  const auto m = snapshots[0].size();
  Eigen::MatrixXcd r = Eigen::MatrixXcd::Zero(m, m);
  for (const auto& x : snapshots) {
    if (x.size() != m) throw ConfigError("snapshot sizes differ");
    r.noalias() += x * x.adjoint();
  }
  return r / static_cast<double>(snapshots.size());
}

Eigen::MatrixXcd SpatialCovariance(const FrameSpectra& spectra, int bin) {
  if (spectra.snapshots.empty()) {
    throw ConfigError("covariance needs at least one snapshot");
  }
  const auto m = spectra.num_channels();
  Eigen::MatrixXcd r = Eigen::MatrixXcd::Zero(m, m);
  for (const auto& snap : spectra.snapshots) {
    const Eigen::VectorXcd x = snap.col(bin);
    r.noalias() += x * x.adjoint();
  }
  return r / static_cast<double>(spectra.snapshots.size());
}

Eigen::MatrixXcd NoiseSubspace(const Eigen::MatrixXcd& covariance,
                               int num_sources) {
  const auto m = covariance.rows();
  if (num_sources < 1 || num_sources >= m) {
    throw ConfigError("num_sources must satisfy 1 <= P < M");
  }
  // Eigen returns ascending eigenvalues; a diagonal input keeps its
  // coordinate basis in index order.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(covariance);
  return eig.eigenvectors().leftCols(m - num_sources);
}

std::unique_ptr<FrameScorer> MakeMusicScorer(const FrameSpectra& spectra,
                                             const MicArrayGeometry& geom,
                                             int num_sources) {
  return std::make_unique<MusicScorer>(spectra, geom, num_sources);
}

std::unique_ptr<FrameScorer> MakeTopsScorer(const FrameSpectra& spectra,
                                            const MicArrayGeometry& geom,
                                            int num_sources, bool projection) {
  return std::make_unique<TopsScorerImpl>(spectra, geom, num_sources,
                                          projection);
}

double TopsSigmaMin(const FrameSpectra& spectra, const MicArrayGeometry& geom,
                    double azimuth_rad, int num_sources, bool projection) {
  return TopsScorerImpl(spectra, geom, num_sources, projection)
      .SigmaMin(azimuth_rad);
}

ScoreSpectrum MusicSpectrum(const FrameSpectra& spectra,
                            const MicArrayGeometry& geom,
                            const AngularGrid& restricted_grid,
                            int num_sources) {
  return ScanScores(MusicScorer(spectra, geom, num_sources), restricted_grid,
                    Method::kMusic, spectra.frame_index);
}

ScoreSpectrum TopsSpectrum(const FrameSpectra& spectra,
                           const MicArrayGeometry& geom,
                           const AngularGrid& restricted_grid, int num_sources,
                           bool projection) {
  return ScanScores(TopsScorerImpl(spectra, geom, num_sources, projection),
                    restricted_grid, Method::kTops, spectra.frame_index);
}

}  // namespace doa
