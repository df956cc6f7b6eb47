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

#include "doa/error.h"
#include "doa/estimators.h"

namespace doa {
namespace {

constexpr double kPhatFloor = 1e-12;

}  // namespace

GccPhat::GccPhat(const FrameSpectra& spectra, int i, int j)
    : fft_size_(spectra.fft_size), band_(spectra.band) {
  const int m = spectra.num_channels();
  if (i < 0 || j < 0 || i >= m || j >= m) {
    throw ConfigError("GCC-PHAT channel index out of range");
  }
  weighted_.reserve(band_.size());
  for (int k = band_.lo; k <= band_.hi; ++k) {
    std::complex<double> cross = 0.0;
    for (const auto& snap : spectra.snapshots) {
      cross += std::conj(snap(i, k)) * snap(j, k);
    }
    const double mag = std::abs(cross);
    weighted_.push_back(mag < kPhatFloor ? std::complex<double>(0.0)
                                         : cross / mag);
  }
}

double GccPhat::At(double lag_samples) const {
  if (weighted_.empty()) return 0.0;
  const double w = 2.0 * kPi * lag_samples / fft_size_;
  const std::complex<double> step = std::polar(1.0, w);
  std::complex<double> rot = std::polar(1.0, w * band_.lo);
  double acc = 0.0;
  for (const auto& g : weighted_) {
    acc += g.real() * rot.real() - g.imag() * rot.imag();
    rot *= step;
  }
  return acc / static_cast<double>(weighted_.size());
}

std::vector<double> GccPhat::IntegerLags() const {
  const int n = fft_size_;
  std::vector<std::complex<double>> full(n);
  for (int k = band_.lo; k <= band_.hi; ++k) {
    const auto g = weighted_[k - band_.lo];
    full[k] += 0.5 * g;
    full[(n - k) % n] += 0.5 * std::conj(g);
  }
  const auto time = Ifft(full);
  std::vector<double> out(n);
  const double scale =
      weighted_.empty() ? 0.0 : static_cast<double>(n) / weighted_.size();
  for (int t = 0; t < n; ++t) out[t] = time[t].real() * scale;
  return out;
}

double GccPhat::AtInteger(int lag) const {
  return At(static_cast<double>(lag));
}

double GccPhat::PeakLag(int max_lag, bool refine) const {
  const auto values = IntegerLags();
  const int n = fft_size_;
  max_lag = std::min(max_lag, n / 2 - 1);
  int best = 0;
  double best_value = values[0];
  for (int lag = -max_lag; lag <= max_lag; ++lag) {
    const double v = values[((lag % n) + n) % n];
    if (v > best_value || (v == best_value && std::abs(lag) < std::abs(best))) {
      best = lag;
      best_value = v;
    }
  }
  if (!refine) return best;

  // Coarse scan then golden-section search on the continuous correlation.
  double lo = best - 1.0;
  double center = best;
  double center_value = best_value;
  for (double x = lo; x <= best + 1.0 + 1e-12; x += 0.05) {
    const double v = At(x);
    if (v > center_value) {
      center = x;
      center_value = v;
    }
  }
  double a = center - 0.05, b = center + 0.05;
  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - ratio * (b - a), d = a + ratio * (b - a);
  double fc = At(c), fd = At(d);
  while (b - a > 1e-6) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - ratio * (b - a);
      fc = At(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + ratio * (b - a);
      fd = At(d);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace doa
