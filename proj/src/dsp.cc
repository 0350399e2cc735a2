// src/dsp.cc

// Copyright 2026  The Wavefront Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "wavefront/dsp.h"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace wavefront {

void validate_waveform(const Waveform& w) {
  if (w.sample_rate <= 0) throw std::invalid_argument("waveform: sample_rate must be positive");
  if (w.samples.empty()) throw std::invalid_argument("waveform: no samples");
  for (std::size_t i = 0; i < w.samples.size(); ++i) {
    if (!std::isfinite(w.samples[i])) {
      throw std::invalid_argument("waveform: non-finite sample at index " + std::to_string(i));
    }
  }
}

Window hanning_window(std::size_t n_taps) {
  if (n_taps == 0) throw std::invalid_argument("hanning_window: n_taps must be >= 1");
  Window w{std::vector<double>(n_taps, 1.0), WindowKind::kHanning};
  if (n_taps == 1) return w;
  const double denom = static_cast<double>(n_taps - 1);
  for (std::size_t i = 0; i < n_taps; ++i) {
    w.taps[i] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / denom));
  }
  // Force exact symmetry; cos() is not guaranteed to be symmetric in the last ulp.
  for (std::size_t i = 0; i < n_taps / 2; ++i) w.taps[n_taps - 1 - i] = w.taps[i];
  return w;
}

Window squared_hanning_window(std::size_t n_taps) {
  Window w = hanning_window(n_taps);
  for (double& t : w.taps) t *= t;
  w.kind = WindowKind::kSquaredHanning;
  return w;
}

Waveform preemphasis(const Waveform& w, double coeff) {
  if (!(coeff >= 0.0 && coeff < 1.0)) {
    throw std::invalid_argument("preemphasis: coeff must be in [0, 1)");
  }
  Waveform out{std::vector<double>(w.samples.size()), w.sample_rate};
  if (w.samples.empty()) return out;
  out.samples[0] = w.samples[0];
  for (std::size_t t = 1; t < w.samples.size(); ++t) {
    out.samples[t] = w.samples[t] - coeff * w.samples[t - 1];
  }
  return out;
}

std::size_t num_frames(std::size_t len, std::size_t win_len, std::size_t hop) {
  if (hop == 0) throw std::invalid_argument("num_frames: hop must be >= 1");
  if (len < win_len || win_len == 0) return 0;
  return (len - win_len) / hop + 1;
}

std::vector<std::vector<double>> frame_signal(const Waveform& w, std::size_t win_len,
                                              std::size_t hop) {
  if (hop == 0) throw std::invalid_argument("frame_signal: hop must be >= 1");
  if (win_len == 0 || win_len > w.samples.size()) {
    throw std::invalid_argument("frame_signal: window of " + std::to_string(win_len) +
                                " samples does not fit a signal of " +
                                std::to_string(w.samples.size()) + " (pad first)");
  }
  const std::size_t n = num_frames(w.samples.size(), win_len, hop);
  std::vector<std::vector<double>> frames;
  frames.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const auto first = w.samples.begin() + static_cast<std::ptrdiff_t>(k * hop);
    frames.emplace_back(first, first + static_cast<std::ptrdiff_t>(win_len));
  }
  return frames;
}

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

std::size_t next_power_of_two(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

Fft::Fft(std::size_t n) : n_(n) {
  if (!is_power_of_two(n)) {
    throw std::invalid_argument("Fft: size " + std::to_string(n) + " is not a power of two");
  }
  std::size_t bits = 0;
  while ((std::size_t{1} << bits) < n) ++bits;
  bitrev_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t r = 0;
    for (std::size_t b = 0; b < bits; ++b) r |= ((i >> b) & 1U) << (bits - 1 - b);
    bitrev_[i] = r;
  }
  twiddles_.resize(n / 2);
  for (std::size_t k = 0; k < n / 2; ++k) {
    const double angle = -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
    twiddles_[k] = {std::cos(angle), std::sin(angle)};
  }
}

void Fft::forward(std::span<std::complex<double>> data) const { transform(data, false); }

void Fft::inverse(std::span<std::complex<double>> data) const {
  transform(data, true);
  const double scale = 1.0 / static_cast<double>(n_);
  for (auto& v : data) v *= scale;
}

void Fft::transform(std::span<std::complex<double>> data, bool inverse) const {
  if (data.size() != n_) throw std::invalid_argument("Fft: buffer size mismatch");
  for (std::size_t i = 0; i < n_; ++i) {
    if (i < bitrev_[i]) std::swap(data[i], data[bitrev_[i]]);
  }
  // Split real/imag arithmetic: std::complex operator* carries NaN handling
  // that blocks vectorization.
  auto* d = reinterpret_cast<double*>(data.data());
  const auto* tw = reinterpret_cast<const double*>(twiddles_.data());
  const double sign = inverse ? -1.0 : 1.0;
  for (std::size_t len = 2; len <= n_; len <<= 1) {
    const std::size_t half = len / 2;
    const std::size_t step = n_ / len;
    for (std::size_t start = 0; start < n_; start += len) {
      for (std::size_t j = 0; j < half; ++j) {
        const double wr = tw[2 * j * step];
        const double wi = sign * tw[2 * j * step + 1];
        double* a = d + 2 * (start + j);
        double* b = d + 2 * (start + j + half);
        const double br = b[0] * wr - b[1] * wi;
        const double bi = b[0] * wi + b[1] * wr;
        b[0] = a[0] - br;
        b[1] = a[1] - bi;
        a[0] += br;
        a[1] += bi;
      }
    }
  }
}

std::vector<double> power_spectrum(const Fft& fft, std::span<const double> frame) {
  const std::size_t n_fft = fft.size();
  if (frame.size() > n_fft) {
    throw std::invalid_argument("power_spectrum: frame longer than n_fft");
  }
  std::vector<std::complex<double>> buf(n_fft);
  for (std::size_t i = 0; i < frame.size(); ++i) buf[i] = frame[i];
  fft.forward(buf);
  std::vector<double> out(n_fft / 2 + 1);
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = std::norm(buf[k]);
  return out;
}

std::vector<double> power_spectrum(std::span<const double> frame, std::size_t n_fft) {
  return power_spectrum(Fft(n_fft), frame);
}

}  // namespace wavefront
