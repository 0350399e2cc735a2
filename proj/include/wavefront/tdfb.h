// include/wavefront/tdfb.h

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

#ifndef WAVEFRONT_TDFB_H_
#define WAVEFRONT_TDFB_H_

#include <complex>
#include <cstddef>
#include <optional>
#include <vector>

#include "wavefront/dsp.h"
#include "wavefront/matrix.h"
#include "wavefront/melfb.h"

namespace wavefront {

/// Per-filter Gabor wavelet: center frequency (Hz) and the standard
/// deviation of its Gaussian time envelope (seconds).
struct GaborParams {
  std::vector<double> center_freqs_hz;
  std::vector<double> sigmas_s;
  int sample_rate = 16000;

  std::size_t size() const { return center_freqs_hz.size(); }
};

/// Gabor wavelets matched to a mel filterbank. Centers are the mel centers.
/// Each envelope width is chosen so the wavelet's power response has the same
/// frequency variance as the mel filter's effective response: the triangle's
/// own variance plus the spectral spread of the Hann analysis window of
/// `analysis_window_len` taps (sr^2 / (3 (L - 1)^2)).
GaborParams gabor_params_from_mel(const MelFilterbankMatrix& fb,
                                  std::size_t analysis_window_len = 400);

/// Complex taps of filter n, centered at index (width - 1) / 2:
/// tap(t) = exp(-t^2 / (2 (sigma sr)^2)) exp(i 2 pi eta t / sr) / (sqrt(2 pi) sigma sr).
std::vector<std::complex<double>> gabor_impulse_response(const GaborParams& p, std::size_t n,
                                                         std::size_t width);

struct TdfbConfig {
  std::size_t n_filters = 64;
  std::size_t width = 400;           // first convolution
  std::size_t lowpass_width = 400;   // squared-Hann decimator
  std::size_t stride = 160;
  int sample_rate = 16000;
  bool apply_log = true;
};

struct TdfbParams {
  /// 2 n_filters x width. Row 2n holds the real taps of filter n, row 2n+1
  /// the imaginary taps. Learnable.
  Matrix conv_taps;
  /// L1-normalized squared Hann; never receives gradient.
  std::vector<double> lowpass;
  std::size_t stride = 160;
  int sample_rate = 16000;
  bool apply_log = true;
  /// Mel centers the filters were initialized from (inspection only).
  std::vector<double> init_center_freqs_hz;

  std::size_t num_filters() const { return conv_taps.rows() / 2; }
  std::size_t width() const { return conv_taps.cols(); }
};

/// Amplitude applied to the Gabor taps so that, at initialization, the
/// filterbank energies match the scale of the mel path (unnormalized DFT of
/// a Hann-windowed frame): sqrt(n_fft * sum(hann^2)).
double mel_matched_gain(const MelConfig& mel);

/// Gabor-initialized parameters replicating the mel filterbank of `mel`.
TdfbParams init_tdfb_params(const TdfbConfig& cfg, const MelConfig& mel);

/// Parameters with explicit taps (used by toy instances and checkpoints).
TdfbParams make_tdfb_params(Matrix conv_taps, std::size_t lowpass_width, std::size_t stride,
                            bool apply_log, int sample_rate = 16000);

struct TdfbCache {
  std::vector<double> input;
  std::vector<std::vector<std::complex<double>>> filtered;  // per filter, length T
  std::vector<std::vector<std::complex<double>>> input_blocks;  // block spectra
  Matrix pooled;  // pre-abs lowpass output, n_filters x frames
  std::size_t block_size = 0;
  std::size_t n_filters = 0;
  std::size_t width = 0;
  bool apply_log = true;
};

struct TdfbGradients {
  Matrix conv_taps;
  std::optional<std::vector<double>> waveform;
};

/// Complex conv (same padding, stride 1) -> |.|^2 -> depthwise squared-Hann
/// lowpass (valid, strided) -> abs -> optional log(1 + .).
FeatureMap tdfb_forward(const Waveform& w, const TdfbParams& p, TdfbCache* cache = nullptr);

/// Gradients w.r.t. conv taps and, if `want_input_grad`, the waveform. The
/// input gradient is computed directly in O(filters * T * width).
TdfbGradients tdfb_backward(const Matrix& grad_out, const TdfbParams& p, const TdfbCache& cache,
                            bool want_input_grad = false);

struct CenterFrequencyRow {
  std::size_t filter = 0;
  double learned_hz = 0.0;
  double init_hz = 0.0;
};

/// Frequency (Hz, in [0, Nyquist]) of each filter's peak power response,
/// |H(f)|^2 + |H(-f)|^2, on an n_fft-point DFT grid.
std::vector<CenterFrequencyRow> center_frequency_report(const TdfbParams& p,
                                                        std::size_t n_fft = 512);

}  // namespace wavefront

#endif  // WAVEFRONT_TDFB_H_
