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

#include "doa/dsp.h"

#include <algorithm>
#include <cmath>

#include <unsupported/Eigen/FFT>

#include "doa/error.h"
#include "doa/geometry.h"

namespace doa {
namespace {

Eigen::FFT<double>& ThreadFft() {
  thread_local Eigen::FFT<double> fft;
  return fft;
}

bool IsPow2(size_t n) { return n > 0 && (n & (n - 1)) == 0; }

double Sinc(double x) {
  if (std::abs(x) < 1e-12) return 1.0;
  if (x == std::round(x)) return 0.0;  // sin(pi k) is not exactly 0 in floating point
  return std::sin(kPi * x) / (kPi * x);
}

}  // namespace

void MultichannelAudio::Validate() const {
  if (sample_rate_hz <= 0) throw DataError("audio sample rate must be positive");
  if (channels.empty()) throw DataError("audio has no channels");
  for (const auto& ch : channels) {
    if (ch.size() != channels[0].size()) {
      throw DataError("audio channels have different lengths");
    }
  }
}

int MsToSamples(double ms, int sample_rate_hz) {
  return static_cast<int>(std::lround(ms * 1e-3 * sample_rate_hz));
}

int NextPow2(int n) {
  int p = 1;
  while (p < n) p <<= 1;
  return p;
}

std::vector<RawFrame> FrameSignal(const MultichannelAudio& audio,
                                  double window_ms, double hop_ms) {
  audio.Validate();
  if (hop_ms <= 0.0) hop_ms = window_ms;
  const int window = MsToSamples(window_ms, audio.sample_rate_hz);
  const int hop = MsToSamples(hop_ms, audio.sample_rate_hz);
  if (window < 1) throw ConfigError("analysis window is shorter than a sample");
  if (hop > window) throw ConfigError("hop must not exceed the window");
  if (hop < 1) throw ConfigError("hop is shorter than a sample");
  if (window > audio.num_samples()) {
    throw ConfigError("analysis window (" + std::to_string(window) +
                      " samples) is longer than the signal (" +
                      std::to_string(audio.num_samples()) + " samples)");
  }
  std::vector<RawFrame> frames;
  int index = 0;
  for (int64_t start = 0; start + window <= audio.num_samples();
       start += hop, ++index) {
    RawFrame f;
    f.index = index;
    f.start = start;
    f.channels.reserve(audio.channels.size());
    for (const auto& ch : audio.channels) {
      f.channels.emplace_back(ch.begin() + start, ch.begin() + start + window);
    }
    frames.push_back(std::move(f));
  }
  return frames;
}

std::vector<double> MakeWindow(WindowType type, int length) {
  std::vector<double> w(length, 1.0);
  if (type == WindowType::kHann && length > 1) {
    // Periodic Hann.
    for (int n = 0; n < length; ++n) {
      w[n] = 0.5 - 0.5 * std::cos(2.0 * kPi * n / length);
    }
  }
  return w;
}

std::vector<std::complex<double>> Fft(std::span<const std::complex<double>> x) {
  if (!IsPow2(x.size())) throw ConfigError("FFT length must be a power of two");
  std::vector<std::complex<double>> in(x.begin(), x.end());
  std::vector<std::complex<double>> out;
  ThreadFft().fwd(out, in);
  return out;
}

std::vector<std::complex<double>> Ifft(std::span<const std::complex<double>> x) {
  if (!IsPow2(x.size())) throw ConfigError("FFT length must be a power of two");
  std::vector<std::complex<double>> in(x.begin(), x.end());
  std::vector<std::complex<double>> out;
  ThreadFft().inv(out, in);
  return out;
}

std::vector<std::complex<double>> RealFft(std::span<const double> x, int n) {
  if (!IsPow2(static_cast<size_t>(n)) || static_cast<int>(x.size()) > n) {
    throw ConfigError("RealFft size must be a power of two >= input length");
  }
  std::vector<std::complex<double>> in(n);
  std::copy(x.begin(), x.end(), in.begin());
  auto full = Fft(in);
  full.resize(n / 2 + 1);
  return full;
}

BinRange SelectBand(int fft_size, int sample_rate_hz, double f_lo_hz,
                    double f_hi_hz) {
  const double nyquist = sample_rate_hz / 2.0;
  if (!(f_lo_hz >= 0.0) || !(f_hi_hz <= nyquist) || !(f_lo_hz < f_hi_hz)) {
    throw ConfigError("band must satisfy 0 <= f_lo < f_hi <= fs/2");
  }
  const double scale = static_cast<double>(fft_size) / sample_rate_hz;
  // Small tolerance so exact bin frequencies are not pushed outward by
  // rounding.
  BinRange r;
  r.lo = static_cast<int>(std::floor(f_lo_hz * scale + 1e-9));
  r.hi = static_cast<int>(std::ceil(f_hi_hz * scale - 1e-9));
  r.lo = std::clamp(r.lo, 0, fft_size / 2);
  r.hi = std::clamp(r.hi, 0, fft_size / 2);
  if (r.size() < 1) throw ConfigError("band selects no DFT bins");
  return r;
}

double FrameEnergy(const RawFrame& frame) {
  double sum = 0.0;
  size_t count = 0;
  for (const auto& ch : frame.channels) {
    for (double v : ch) sum += v * v;
    count += ch.size();
  }
  return count == 0 ? 0.0 : sum / static_cast<double>(count);
}

FrameSpectra DftFrame(const RawFrame& frame, int sample_rate_hz,
                      const DftOptions& options) {
  const int length = frame.length();
  const int snap_len = options.snapshot_len > 0
                           ? std::min(options.snapshot_len, length)
                           : length;
  if (snap_len < 1) throw ConfigError("empty frame");
  const int hop = std::max(
      1, static_cast<int>(std::lround(snap_len * options.snapshot_hop)));
  const int n = options.fft_size > 0 ? options.fft_size : NextPow2(snap_len);
  if (n < snap_len || !IsPow2(static_cast<size_t>(n))) {
    throw ConfigError("fft_size must be a power of two >= snapshot length");
  }
  const auto window = MakeWindow(options.window, snap_len);
  const int num_ch = static_cast<int>(frame.channels.size());

  FrameSpectra out;
  out.frame_index = frame.index;
  out.frame_start = frame.start;
  out.window_ms = 1e3 * length / sample_rate_hz;
  out.sample_rate_hz = sample_rate_hz;
  out.fft_size = n;
  out.energy = FrameEnergy(frame);
  std::vector<double> buf(snap_len);
  for (int s = 0; s + snap_len <= length; s += hop) {
    Eigen::MatrixXcd snap(num_ch, n / 2 + 1);
    for (int m = 0; m < num_ch; ++m) {
      for (int t = 0; t < snap_len; ++t) {
        buf[t] = frame.channels[m][s + t] * window[t];
      }
      const auto spec = RealFft(buf, n);
      for (int k = 0; k <= n / 2; ++k) snap(m, k) = spec[k];
    }
    out.snapshots.push_back(std::move(snap));
  }
  out.band = {0, n / 2};
  return out;
}

std::vector<FrameSpectra> DftFrames(std::span<const RawFrame> frames,
                                    int sample_rate_hz,
                                    const DftOptions& options) {
  std::vector<FrameSpectra> out;
  out.reserve(frames.size());
  for (const auto& f : frames) out.push_back(DftFrame(f, sample_rate_hz, options));
  return out;
}

double MedianEnergy(std::span<const double> energies) {
  if (energies.empty()) throw ConfigError("median of no frames");
  std::vector<double> sorted(energies.begin(), energies.end());
  const size_t mid = (sorted.size() - 1) / 2;
  std::nth_element(sorted.begin(), sorted.begin() + mid, sorted.end());
  return sorted[mid];
}

bool VadEnergy(double frame_energy, double median_energy,
               double threshold_ratio) {
  return frame_energy > 0.0 && frame_energy >= threshold_ratio * median_energy;
}

std::vector<bool> VadDecisions(std::span<const double> energies,
                               double threshold_ratio) {
  if (threshold_ratio < 0.0) throw ConfigError("VAD threshold must be >= 0");
  std::vector<bool> active;
  if (energies.empty()) return active;
  const double median = MedianEnergy(energies);
  active.reserve(energies.size());
  for (double e : energies) active.push_back(VadEnergy(e, median, threshold_ratio));
  return active;
}

std::vector<double> FractionalDelay(std::span<const double> x,
                                    double delay_samples, int taps) {
  if (taps < 3 || taps % 2 == 0) throw ConfigError("taps must be odd and >= 3");
  const int half = taps / 2;
  const double whole = std::round(delay_samples);
  const double frac = delay_samples - whole;
  const auto shift = static_cast<int64_t>(whole);

  std::vector<double> h(taps);
  for (int k = -half; k <= half; ++k) {
    const double u = k - frac;
    const double w = 0.5 * (1.0 + std::cos(kPi * u / (half + 1)));
    h[k + half] = Sinc(u) * w;
  }

  const auto n = static_cast<int64_t>(x.size());
  std::vector<double> y(x.size(), 0.0);
  for (int64_t t = 0; t < n; ++t) {
    double acc = 0.0;
    for (int k = -half; k <= half; ++k) {
      const int64_t src = t - shift - k;
      if (src >= 0 && src < n) acc += h[k + half] * x[src];
    }
    y[t] = acc;
  }
  return y;
}

std::vector<FrameSpectra> AnalyzeAudio(const MultichannelAudio& audio,
                                       const AnalysisOptions& options) {
  const auto frames = FrameSignal(audio, options.window_ms, options.hop_ms);
  auto spectra = DftFrames(frames, audio.sample_rate_hz, options.dft);
  std::vector<double> energies;
  energies.reserve(spectra.size());
  for (const auto& s : spectra) energies.push_back(s.energy);
  const auto active = VadDecisions(energies, options.vad_threshold);
  for (size_t i = 0; i < spectra.size(); ++i) {
    spectra[i].vad_active = active[i];
    spectra[i].band = SelectBand(spectra[i].fft_size, audio.sample_rate_hz,
                                 options.band_lo_hz, options.band_hi_hz);
  }
  return spectra;
}

}  // namespace doa
