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

// Randomized property checks across modules. Every generator is seeded, so
// failures reproduce.

#include <algorithm>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "doa/dsp.h"
#include "doa/estimators.h"
#include "doa/geometry.h"
#include "doa/grid.h"
#include "doa/prior.h"
#include "doa/simulator.h"
#include "oracles.h"

namespace doa {
namespace {

using Rng = std::mt19937_64;

double Uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

MicArrayGeometry RandomGeometry(Rng& rng) {
  const int m = std::uniform_int_distribution<int>(2, 8)(rng);
  std::vector<Point2> mics;
  double cx = 0.0, cy = 0.0;
  for (int i = 0; i < m; ++i) {
    mics.push_back({Uniform(rng, -0.1, 0.1), Uniform(rng, -0.1, 0.1)});
    cx += mics.back().x / m;
    cy += mics.back().y / m;
  }
  // Positions are relative to the array center.
  for (auto& p : mics) {
    p.x -= cx;
    p.y -= cy;
  }
  return MicArrayGeometry(mics, 16000, 343.0);
}

PriorMap RandomPrior(Rng& rng) {
  std::vector<Arc> arcs;
  const int n = std::uniform_int_distribution<int>(1, 4)(rng);
  for (int i = 0; i < n; ++i) {
    const double a = Uniform(rng, 0.0, 360.0);
    arcs.push_back({a, std::fmod(a + Uniform(rng, 1.0, 200.0), 360.0)});
  }
  return ExpertPrior(arcs);
}

int MaskGridSize(const AngularGrid& grid, const PriorMap& prior) {
  int n = 0;
  for (double d : grid.degrees()) n += prior.Z(d);
  return n;
}

AnalysisOptions Options(Method method, double window_ms = 256.0) {
  AnalysisOptions o;
  o.window_ms = window_ms;
  o.dft.snapshot_len = DefaultSnapshotLen(method, 16000);
  return o;
}

// --- geometry --------------------------------------------------------------

TEST(GeometryProperty, PairwiseDelayBoundedByAperture) {
  Rng rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    const auto g = RandomGeometry(rng);
    const double bound = g.Aperture() / g.speed_of_sound();
    for (int k = 0; k < 20; ++k) {
      const auto tau = TdoaForAngle(g, Uniform(rng, -10.0, 10.0));
      const auto [lo, hi] = std::minmax_element(tau.begin(), tau.end());
      EXPECT_LE(*hi - *lo, bound * (1 + 1e-12));
    }
  }
}

TEST(GeometryProperty, RotatingMicsAndAzimuthTogetherKeepsDelays) {
  Rng rng(2);
  for (int trial = 0; trial < 200; ++trial) {
    const auto g = RandomGeometry(rng);
    const double alpha = Uniform(rng, -kPi, kPi);
    const double az = Uniform(rng, 0.0, 2 * kPi);
    std::vector<Point2> rotated;
    for (const auto& p : g.mic_positions()) {
      rotated.push_back({p.x * std::cos(alpha) - p.y * std::sin(alpha),
                         p.x * std::sin(alpha) + p.y * std::cos(alpha)});
    }
    const MicArrayGeometry r(rotated, g.sample_rate_hz(), g.speed_of_sound());
    const auto a = TdoaForAngle(g, az);
    const auto b = TdoaForAngle(r, az + alpha);
    for (size_t m = 0; m < a.size(); ++m) EXPECT_NEAR(a[m], b[m], 1e-12);
  }
}

TEST(GeometryProperty, FarFieldWithinOnePercentAtHundredApertures) {
  Rng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const auto g = RandomGeometry(rng);
    std::vector<double> mx, my;
    for (const auto& p : g.mic_positions()) {
      mx.push_back(p.x);
      my.push_back(p.y);
    }
    const double az = Uniform(rng, 0.0, 2 * kPi);
    const auto exact =
        oracle::SphericalDelays(mx, my, az, 100.0 * g.Aperture(), g.speed_of_sound());
    const auto far = TdoaForAngle(g, az);
    // Pairwise differences, relative to the largest possible one. Relative
    // to the actual difference the bound cannot hold near broadside, where
    // the far-field difference goes to zero.
    const double scale = g.Aperture() / g.speed_of_sound();
    double worst = 0.0;
    for (size_t i = 0; i < far.size(); ++i) {
      for (size_t j = 0; j < far.size(); ++j) {
        worst = std::max(worst, std::abs((far[i] - far[j]) - (exact[i] - exact[j])));
      }
    }
    EXPECT_LE(worst, 0.01 * scale);
  }
}

// --- dsp -------------------------------------------------------------------

TEST(DspProperty, FramingWithHopEqualWindowReconstructsPrefix) {
  Rng rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    MultichannelAudio a;
    a.sample_rate_hz = 16000;
    const int n = std::uniform_int_distribution<int>(160, 5000)(rng);
    for (int c = 0; c < 3; ++c) a.channels.push_back(oracle::WhiteNoise(n, rng()));
    const double window_ms = std::uniform_int_distribution<int>(1, 10)(rng);
    const auto frames = FrameSignal(a, window_ms, window_ms);
    const int w = MsToSamples(window_ms, 16000);
    ASSERT_EQ(static_cast<int>(frames.size()), n / w);
    for (int c = 0; c < 3; ++c) {
      std::vector<double> joined;
      for (const auto& f : frames) {
        joined.insert(joined.end(), f.channels[c].begin(), f.channels[c].end());
      }
      EXPECT_EQ(joined, std::vector<double>(a.channels[c].begin(),
                                            a.channels[c].begin() + joined.size()));
    }
  }
}

TEST(DspProperty, FractionalDelayRoundTripBelowMinus60Db) {
  Rng rng(5);
  const int n = 4000;
  for (int trial = 0; trial < 30; ++trial) {
    // Band-limited to 0.35 fs.
    std::vector<double> x(n, 0.0);
    for (int k = 0; k < 20; ++k) {
      const auto tone = oracle::Tone(Uniform(rng, 50.0, 5600.0), 16000, n, Uniform(rng, 0, 6.3));
      for (int t = 0; t < n; ++t) x[t] += tone[t];
    }
    const double d = Uniform(rng, -4.0, 4.0);
    const auto y = FractionalDelay(FractionalDelay(x, d), -d);
    const int edge = 200;
    double err = 0.0;
    for (int t = edge; t < n - edge; ++t) err += (y[t] - x[t]) * (y[t] - x[t]);
    const double ratio = err / ((n - 2 * edge) * oracle::MeanSquare(x, edge, n - edge));
    EXPECT_LE(10 * std::log10(ratio), -60.0) << "delay " << d;
  }
}

TEST(DspProperty, VadInvariantToGain) {
  Rng rng(6);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> energies(std::uniform_int_distribution<int>(1, 40)(rng));
    for (double& e : energies) e = std::pow(10.0, Uniform(rng, -6, 2));
    const double ratio = Uniform(rng, 0.0, 2.0);
    const auto base = VadDecisions(energies, ratio);
    // Powers of two keep the scaled energies exact.
    const double gain = std::ldexp(1.0, std::uniform_int_distribution<int>(-20, 20)(rng));
    for (double& e : energies) e *= gain * gain;
    EXPECT_EQ(VadDecisions(energies, ratio), base);
  }
}

TEST(DspProperty, VadInvariantToAudioGain) {
  const auto g = DefaultBenchmarkArray();
  SceneSpec s;
  s.true_azimuth_deg = 30;
  s.duration_s = 2.0;
  auto scene = SynthScene(s, g);
  // Silence the middle so the VAD has something to reject.
  for (auto& ch : scene.clean.channels) {
    std::fill(ch.begin() + 8000, ch.begin() + 20000, 0.0);
  }
  auto loud = scene.clean;
  for (auto& ch : loud.channels) {
    for (double& v : ch) v *= 37.5;
  }
  const auto a = AnalyzeAudio(scene.clean, Options(Method::kSrpPhat, 128));
  const auto b = AnalyzeAudio(loud, Options(Method::kSrpPhat, 128));
  int inactive = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].vad_active, b[i].vad_active);
    inactive += !a[i].vad_active;
  }
  EXPECT_GT(inactive, 0);
}

// --- estimators ------------------------------------------------------------

class EstimatorProperty : public ::testing::TestWithParam<Method> {};

TEST_P(EstimatorProperty, ArgmaxInvariantToChannelScale) {
  const auto g = DefaultBenchmarkArray();
  const auto grid = AngularGrid::Uniform(180);
  EstimatorOptions opt;
  opt.method = GetParam();
  Rng rng(7);
  for (int trial = 0; trial < 4; ++trial) {
    SceneSpec s;
    s.true_azimuth_deg = Uniform(rng, 0, 360);
    s.snr_db = {5.0};
    s.duration_s = 1.0;
    s.seed = rng();
    const auto scene = SynthScene(s, g);
    auto scaled = scene.noisy[0];
    const double c = Uniform(rng, 1e-3, 1e3);
    for (auto& ch : scaled.channels) {
      for (double& v : ch) v *= c;
    }
    const auto a = AnalyzeAudio(scene.noisy[0], Options(opt.method));
    const auto b = AnalyzeAudio(scaled, Options(opt.method));
    for (size_t f = 0; f < a.size(); ++f) {
      const auto ea = EstimateFrame(a[f], g, grid, PriorMap::AllFree(), opt);
      const auto eb = EstimateFrame(b[f], g, grid, PriorMap::AllFree(), opt);
      EXPECT_EQ(ea.azimuth_deg, eb.azimuth_deg);
      if (opt.method != Method::kGccPair) {
        EXPECT_NEAR(ea.score, eb.score, 1e-6 * std::abs(ea.score));
      }
    }
  }
}

TEST_P(EstimatorProperty, PriorConsistencyAndMonotoneRestriction) {
  const auto g = DefaultBenchmarkArray();
  const auto grid = AngularGrid::Uniform(180);
  EstimatorOptions opt;
  opt.method = GetParam();
  Rng rng(8);
  SceneSpec s;
  s.true_azimuth_deg = 100;
  s.snr_db = {0.0};
  s.duration_s = 1.5;
  s.seed = 8;
  const auto scene = SynthScene(s, g);
  const auto spectra = AnalyzeAudio(scene.noisy[0], Options(opt.method));
  for (const auto& frame : spectra) {
    const auto free = EstimateFrame(frame, g, grid, PriorMap::AllFree(), opt);
    for (int k = 0; k < 10; ++k) {
      const auto prior = RandomPrior(rng);
      if (MaskGridSize(grid, prior) == 0) continue;
      const auto est = EstimateFrame(frame, g, grid, prior, opt);
      EXPECT_TRUE(prior.IsFree(est.azimuth_deg));
      EXPECT_LE(est.score, free.score);
      if (prior.IsFree(free.azimuth_deg)) {
        EXPECT_EQ(est.azimuth_deg, free.azimuth_deg);
        EXPECT_EQ(est.score, free.score);
      }
    }
  }
}

INSTANTIATE_TEST_SUITE_P(AllMethods, EstimatorProperty,
                         ::testing::Values(Method::kSrpPhat, Method::kMusic,
                                           Method::kTops, Method::kGccPair),
                         [](const auto& info) {
                           std::string name = MethodName(info.param);
                           name.erase(std::remove(name.begin(), name.end(), '-'), name.end());
                           return name;
                         });

TEST(EstimatorRotation, ShiftingSourceAndPriorShiftsArgmaxOneBin) {
  const auto g = DefaultBenchmarkArray();
  const auto grid = AngularGrid::Uniform(180);
  for (Method method : {Method::kSrpPhat, Method::kMusic}) {
    EstimatorOptions opt;
    opt.method = method;
    for (double az = 0; az < 360; az += 46) {
      double prev = -1;
      for (int shift = 0; shift < 2; ++shift) {
        const double truth = az + 2.0 * shift;
        SceneSpec s;
        s.true_azimuth_deg = truth;
        s.duration_s = 0.6;
        s.seed = 9;
        const auto scene = SynthScene(s, g);
        const auto spectra = AnalyzeAudio(scene.clean, Options(method));
        const auto prior = CenteredFreePrior(truth + 10.0, 120.0);
        const auto est = EstimateFrame(spectra[0], g, grid, prior, opt);
        if (shift == 1) {
          EXPECT_NEAR(std::fmod(est.azimuth_deg - prev + 360.0, 360.0), 2.0, 1e-9)
              << MethodName(method) << " at " << az;
        }
        prev = est.azimuth_deg;
      }
    }
  }
}

// --- prior -----------------------------------------------------------------

TEST(PriorProperty, ZIsTotal) {
  Rng rng(10);
  for (int trial = 0; trial < 20; ++trial) {
    const auto prior = RandomPrior(rng);
    for (int k = 0; k < 10000 / 20; ++k) {
      const double az = Uniform(rng, -720.0, 720.0);
      const double wrapped = std::fmod(std::fmod(az, 360.0) + 360.0, 360.0);
      int matches = 0, z = -1;
      for (const auto& iv : prior.intervals()) {
        if (wrapped >= iv.start_deg && wrapped < iv.end_deg) {
          ++matches;
          z = iv.z;
        }
      }
      ASSERT_EQ(matches, 1) << az;
      EXPECT_EQ(prior.Z(az), z);
    }
  }
}

TEST(PriorProperty, MaskIsIdempotentAndMonotone) {
  Rng rng(11);
  const auto grid = AngularGrid::Uniform(180);
  for (int trial = 0; trial < 200; ++trial) {
    const auto narrow = RandomPrior(rng);
    if (MaskGridSize(grid, narrow) == 0) continue;
    const auto once = MaskGrid(grid, narrow);
    EXPECT_EQ(MaskGrid(once, narrow), once);

    // Widen by adding one more free arc.
    std::vector<Arc> arcs;
    for (const auto& iv : narrow.FreeIntervals()) arcs.push_back({iv.start_deg, iv.end_deg});
    const double a = Uniform(rng, 0, 360);
    arcs.push_back({a, std::fmod(a + Uniform(rng, 1, 90), 360.0)});
    const auto wide = MaskGrid(grid, ExpertPrior(arcs));
    for (double d : once.degrees()) {
      EXPECT_TRUE(std::find(wide.degrees().begin(), wide.degrees().end(), d) !=
                  wide.degrees().end());
    }
  }
}

TEST(PriorProperty, SegmentationIsPermutationInvariant) {
  Rng rng(12);
  auto thresholds = ThresholdConfig::Default();
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<SegmentationFrame> frames;
    const int n = std::uniform_int_distribution<int>(1, 36)(rng);
    for (int i = 0; i < n; ++i) {
      SegmentationFrame f;
      f.heading_deg = Uniform(rng, 0, 360);
      f.frustum_deg = Uniform(rng, 5, 60);
      for (const auto& [name, t] : thresholds.classes) f.class_fractions[name] = Uniform(rng, 0, 2 * t);
      frames.push_back(f);
    }
    const auto base = PriorFromSegmentation(frames, thresholds);
    std::shuffle(frames.begin(), frames.end(), rng);
    const auto shuffled = PriorFromSegmentation(frames, thresholds);
    EXPECT_EQ(shuffled.prior, base.prior);
  }
}

// --- simulator -------------------------------------------------------------

TEST(SimulatorProperty, SameSpecIsBitIdentical) {
  Rng rng(13);
  const auto g = DefaultBenchmarkArray();
  for (int trial = 0; trial < 10; ++trial) {
    SceneSpec s;
    s.true_azimuth_deg = Uniform(rng, 0, 360);
    s.snr_db = {Uniform(rng, -10, 30)};
    s.duration_s = 0.25;
    s.seed = rng();
    if (trial % 2) s.reflector = Reflector{Uniform(rng, 0, 360), Uniform(rng, 0, 10), 0.5};
    const auto a = SynthScene(s, g);
    const auto b = SynthScene(s, g);
    EXPECT_EQ(a.clean.channels, b.clean.channels);
    EXPECT_EQ(a.noisy[0].channels, b.noisy[0].channels);
    EXPECT_EQ(a.truth.spec_hash, b.truth.spec_hash);
  }
}

}  // namespace
}  // namespace doa
