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

#ifndef DOA_DSP_H_
#define DOA_DSP_H_

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace doa {

// M x N sample matrix, one row per microphone.
struct MultichannelAudio {
  std::vector<std::vector<double>> channels;
  int sample_rate_hz = 0;

  int num_channels() const { return static_cast<int>(channels.size()); }
  int64_t num_samples() const {
    return channels.empty() ? 0 : static_cast<int64_t>(channels[0].size());
  }
  // Throws DataError on ragged channels or a bad rate.
  void Validate() const;
};

// One analysis window cut from a MultichannelAudio.
struct RawFrame {
  int index = 0;
  int64_t start = 0;  // first sample
  std::vector<std::vector<double>> channels;

  int length() const {
    return channels.empty() ? 0 : static_cast<int>(channels[0].size());
  }
};

// Frame k covers [k*hop, k*hop + window). A trailing partial frame is
// dropped. hop_ms <= 0 means hop = window. Throws ConfigError if the window
// is longer than the signal or hop > window.
std::vector<RawFrame> FrameSignal(const MultichannelAudio& audio,
                                  double window_ms, double hop_ms = 0.0);

int MsToSamples(double ms, int sample_rate_hz);
int NextPow2(int n);

enum class WindowType { kRectangular, kHann };

std::vector<double> MakeWindow(WindowType type, int length);

// Full complex DFT (length must be a power of two) and its inverse, with the
// unnormalized forward / 1/N inverse convention.
std::vector<std::complex<double>> Fft(std::span<const std::complex<double>> x);
std::vector<std::complex<double>> Ifft(std::span<const std::complex<double>> x);
// One-sided spectrum (bins 0..n/2) of a real signal zero-padded to n.
std::vector<std::complex<double>> RealFft(std::span<const double> x, int n);

// Inclusive bin index range.
struct BinRange {
  int lo = 0;
  int hi = -1;
  int size() const { return hi - lo + 1; }
  friend bool operator==(const BinRange&, const BinRange&) = default;
};

// Smallest contiguous set of one-sided bins whose center frequencies cover
// [f_lo_hz, f_hi_hz]. Throws ConfigError on an empty or out-of-range band.
BinRange SelectBand(int fft_size, int sample_rate_hz, double f_lo_hz,
                    double f_hi_hz);

struct DftOptions {
  WindowType window = WindowType::kHann;
  // Length of each DFT snapshot inside the analysis frame; 0 uses the whole
  // frame as a single snapshot.
  int snapshot_len = 0;
  // Snapshot hop as a fraction of snapshot_len.
  double snapshot_hop = 0.5;
  // DFT size; 0 means the snapshot length rounded up to a power of two.
  int fft_size = 0;
};

// Frequency-domain view of one analysis frame.
struct FrameSpectra {
  int frame_index = 0;
  int64_t frame_start = 0;
  double window_ms = 0.0;
  int sample_rate_hz = 0;
  int fft_size = 0;
  // Each snapshot is M x (fft_size/2 + 1).
  std::vector<Eigen::MatrixXcd> snapshots;
  BinRange band;
  double energy = 0.0;  // mean-square of the raw frame
  bool vad_active = true;

  int num_channels() const {
    return snapshots.empty() ? 0 : static_cast<int>(snapshots[0].rows());
  }
  int num_snapshots() const { return static_cast<int>(snapshots.size()); }
  double BinFrequency(int bin) const {
    return static_cast<double>(bin) * sample_rate_hz / fft_size;
  }
};

FrameSpectra DftFrame(const RawFrame& frame, int sample_rate_hz,
                      const DftOptions& options);
std::vector<FrameSpectra> DftFrames(std::span<const RawFrame> frames,
                                    int sample_rate_hz,
                                    const DftOptions& options);

// Mean-square energy over all channels and samples.
double FrameEnergy(const RawFrame& frame);

// Lower median (an actual element, so the median frame itself passes at
// ratio 1). Throws ConfigError on empty input.
double MedianEnergy(std::span<const double> energies);

// Active iff energy > 0 and energy >= threshold_ratio * median_energy.
bool VadEnergy(double frame_energy, double median_energy,
               double threshold_ratio);
std::vector<bool> VadDecisions(std::span<const double> energies,
                               double threshold_ratio);

inline constexpr int kFractionalDelayTaps = 81;

// Windowed-sinc fractional delay. Output has the input's length and
// approximates x(t - delay_samples); the integer part of the delay is an
// exact shift, only the remainder in [-0.5, 0.5] is interpolated.
std::vector<double> FractionalDelay(std::span<const double> x,
                                    double delay_samples,
                                    int taps = kFractionalDelayTaps);

// Framing, DFT, band selection and VAD in one pass.
struct AnalysisOptions {
  double window_ms = 256.0;
  double hop_ms = 0.0;
  DftOptions dft;
  double band_lo_hz = 500.0;
  double band_hi_hz = 8000.0;
  double vad_threshold = 0.5;
};

std::vector<FrameSpectra> AnalyzeAudio(const MultichannelAudio& audio,
                                       const AnalysisOptions& options);

}  // namespace doa

#endif  // DOA_DSP_H_
