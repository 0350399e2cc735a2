// include/wavefront/melfb.h

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

#ifndef WAVEFRONT_MELFB_H_
#define WAVEFRONT_MELFB_H_

#include <cstddef>
#include <vector>

#include "wavefront/dsp.h"
#include "wavefront/matrix.h"

namespace wavefront {

enum class FeatureRole { kLogMel, kPreCompressionEnergy, kPcenOut, kTdfbOut };

/// channels x frames. Pre-compression energies are non-negative.
struct FeatureMap {
  Matrix values;
  FeatureRole role = FeatureRole::kLogMel;

  std::size_t channels() const { return values.rows(); }
  std::size_t frames() const { return values.cols(); }
};

/// 2595 log10(1 + f / 700). Negative input is rejected.
double mel_scale(double f_hz);
double mel_scale_inv(double mel);

struct MelFilterbankMatrix {
  Matrix weights;                    // n_filters x (n_fft / 2 + 1)
  std::vector<double> center_freqs_hz;
  std::vector<double> edge_freqs_hz;  // n_filters + 2 grid points, edges included
  std::size_t n_fft = 0;
  int sample_rate = 0;

  std::size_t num_filters() const { return weights.rows(); }
  double bin_width_hz() const { return static_cast<double>(sample_rate) / n_fft; }
  /// Left and right feet of filter n.
  double lower_edge_hz(std::size_t n) const { return edge_freqs_hz[n]; }
  double upper_edge_hz(std::size_t n) const { return edge_freqs_hz[n + 2]; }
};

/// Unit-peak triangles whose peaks sit on n_filters points equally spaced in
/// mel between mel(f_min) and mel(f_max), sampled at FFT bin frequencies.
MelFilterbankMatrix mel_filterbank_matrix(std::size_t n_filters, std::size_t n_fft,
                                          int sample_rate, double f_min, double f_max);

struct MelConfig {
  std::size_t n_filters = 64;
  std::size_t win_len = 400;  // 25 ms at 16 kHz
  std::size_t hop = 160;      // 10 ms
  std::size_t n_fft = 512;
  int sample_rate = 16000;
  double f_min = 0.0;
  double f_max = 8000.0;
};

/// Fixed log-mel path: Hann window, power spectrum, mel projection, and
/// log(1 + M) compression. Holds the FFT plan and filterbank so repeated
/// calls do no setup work.
class MelAnalyzer {
 public:
  explicit MelAnalyzer(const MelConfig& cfg = {});

  const MelConfig& config() const { return cfg_; }
  const MelFilterbankMatrix& filterbank() const { return fb_; }

  /// Mel energies before compression (role kPreCompressionEnergy).
  FeatureMap energies(const Waveform& w) const;
  /// log(1 + energies) (role kLogMel).
  FeatureMap log_features(const Waveform& w) const;

 private:
  MelConfig cfg_;
  MelFilterbankMatrix fb_;
  Window window_;
  Fft fft_;
};

FeatureMap log_mel_features(const Waveform& w, const MelConfig& cfg = {});

/// Elementwise log(1 + x); role becomes kLogMel.
FeatureMap log1p_compress(const FeatureMap& fm);

/// Per-channel standardization over frames using the population standard
/// deviation. Channels with std < 1e-8 are only centered.
FeatureMap mean_variance_normalize(const FeatureMap& fm);

/// Pearson correlation over frames, one value per channel. A constant channel
/// yields NaN. Shapes must match.
std::vector<double> channel_correlations(const FeatureMap& a, const FeatureMap& b);

}  // namespace wavefront

#endif  // WAVEFRONT_MELFB_H_
