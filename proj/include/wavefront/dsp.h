// include/wavefront/dsp.h

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

#ifndef WAVEFRONT_DSP_H_
#define WAVEFRONT_DSP_H_

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace wavefront {

/// Mono waveform with amplitudes nominally in [-1, 1].
struct Waveform {
  std::vector<double> samples;
  int sample_rate = 16000;

  std::size_t size() const { return samples.size(); }
};

/// Throws std::invalid_argument unless sample_rate > 0, the signal is
/// non-empty and every sample is finite.
void validate_waveform(const Waveform& w);

enum class WindowKind { kHanning, kSquaredHanning };

struct Window {
  std::vector<double> taps;
  WindowKind kind = WindowKind::kHanning;
};

/// Symmetric Hann window, taps[i] = 0.5 (1 - cos(2 pi i / (n - 1))).
/// A single-tap window is [1].
Window hanning_window(std::size_t n_taps);
Window squared_hanning_window(std::size_t n_taps);

/// out[0] = in[0], out[t] = in[t] - coeff * in[t - 1]. coeff must be in [0, 1).
Waveform preemphasis(const Waveform& w, double coeff);

/// Number of full frames: floor((len - win_len) / hop) + 1, or 0 if len < win_len.
std::size_t num_frames(std::size_t len, std::size_t win_len, std::size_t hop);

/// Splits into full frames only; the trailing remainder is dropped.
std::vector<std::vector<double>> frame_signal(const Waveform& w, std::size_t win_len,
                                              std::size_t hop);

bool is_power_of_two(std::size_t n);
std::size_t next_power_of_two(std::size_t n);

/// Iterative radix-2 Cooley-Tukey FFT with precomputed twiddles and
/// bit-reversal table. Immutable after construction, so one plan may be
/// shared across threads.
class Fft {
 public:
  explicit Fft(std::size_t n);

  std::size_t size() const { return n_; }

  /// In place, unnormalized: X[k] = sum_t x[t] exp(-2 pi i k t / n).
  void forward(std::span<std::complex<double>> data) const;
  /// In place, scaled by 1/n so that inverse(forward(x)) == x.
  void inverse(std::span<std::complex<double>> data) const;

 private:
  void transform(std::span<std::complex<double>> data, bool inverse) const;

  std::size_t n_;
  std::vector<std::size_t> bitrev_;
  std::vector<std::complex<double>> twiddles_;  // exp(-2 pi i k / n), k < n/2
};

/// |DFT_k(frame zero-padded to n_fft)|^2 for k = 0 .. n_fft/2.
std::vector<double> power_spectrum(std::span<const double> frame, std::size_t n_fft);
std::vector<double> power_spectrum(const Fft& fft, std::span<const double> frame);

}  // namespace wavefront

#endif  // WAVEFRONT_DSP_H_
