// src/melfb.cc

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

#include "wavefront/melfb.h"

#include <cmath>
#include <stdexcept>
#include <string>

namespace wavefront {

double mel_scale(double f_hz) {
  if (!(f_hz >= 0.0)) throw std::invalid_argument("mel_scale: frequency must be >= 0");
  return 2595.0 * std::log10(1.0 + f_hz / 700.0);
}

double mel_scale_inv(double mel) {
  if (!(mel >= 0.0)) throw std::invalid_argument("mel_scale_inv: mel must be >= 0");
  return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0);
}

MelFilterbankMatrix mel_filterbank_matrix(std::size_t n_filters, std::size_t n_fft,
                                          int sample_rate, double f_min, double f_max) {
  if (n_filters == 0) throw std::invalid_argument("mel_filterbank_matrix: n_filters must be >= 1");
  if (sample_rate <= 0) throw std::invalid_argument("mel_filterbank_matrix: bad sample rate");
  if (!is_power_of_two(n_fft)) {
    throw std::invalid_argument("mel_filterbank_matrix: n_fft must be a power of two");
  }
  const double nyquist = 0.5 * sample_rate;
  if (!(f_min >= 0.0 && f_min < f_max)) {
    throw std::invalid_argument("mel_filterbank_matrix: need 0 <= f_min < f_max");
  }
  if (f_max > nyquist) {
    throw std::invalid_argument("mel_filterbank_matrix: f_max " + std::to_string(f_max) +
                                " exceeds Nyquist " + std::to_string(nyquist));
  }

  MelFilterbankMatrix fb;
  fb.n_fft = n_fft;
  fb.sample_rate = sample_rate;
  const std::size_t n_bins = n_fft / 2 + 1;
  fb.weights = Matrix(n_filters, n_bins);

  const double mel_lo = mel_scale(f_min);
  const double mel_hi = mel_scale(f_max);
  const double step = (mel_hi - mel_lo) / static_cast<double>(n_filters + 1);
  fb.edge_freqs_hz.resize(n_filters + 2);
  for (std::size_t i = 0; i < n_filters + 2; ++i) {
    fb.edge_freqs_hz[i] = mel_scale_inv(mel_lo + step * static_cast<double>(i));
  }
  fb.edge_freqs_hz.front() = f_min;
  fb.edge_freqs_hz.back() = f_max;
  fb.center_freqs_hz.assign(fb.edge_freqs_hz.begin() + 1, fb.edge_freqs_hz.end() - 1);

  const double bin_hz = static_cast<double>(sample_rate) / static_cast<double>(n_fft);
  for (std::size_t n = 0; n < n_filters; ++n) {
    const double lo = fb.edge_freqs_hz[n];
    const double mid = fb.edge_freqs_hz[n + 1];
    const double hi = fb.edge_freqs_hz[n + 2];
    double row_sum = 0.0;
    for (std::size_t k = 0; k < n_bins; ++k) {
      const double f = bin_hz * static_cast<double>(k);
      double w = 0.0;
      if (f > lo && f <= mid) {
        w = (f - lo) / (mid - lo);
      } else if (f > mid && f < hi) {
        w = (hi - f) / (hi - mid);
      }
      fb.weights(n, k) = w;
      row_sum += w;
    }
    if (row_sum <= 0.0) {
      throw std::invalid_argument("mel_filterbank_matrix: filter " + std::to_string(n) +
                                  " covers no FFT bin; increase n_fft");
    }
  }
  return fb;
}

MelAnalyzer::MelAnalyzer(const MelConfig& cfg)
    : cfg_(cfg),
      fb_(mel_filterbank_matrix(cfg.n_filters, cfg.n_fft, cfg.sample_rate, cfg.f_min,
                                cfg.f_max)),
      window_(hanning_window(cfg.win_len)),
      fft_(cfg.n_fft) {
  if (cfg.win_len > cfg.n_fft) throw std::invalid_argument("MelAnalyzer: win_len > n_fft");
}

FeatureMap MelAnalyzer::energies(const Waveform& w) const {
  if (w.samples.size() < cfg_.win_len) {
    throw std::invalid_argument("log_mel_features: waveform shorter than one window");
  }
  const std::size_t n_frames = num_frames(w.samples.size(), cfg_.win_len, cfg_.hop);
  const std::size_t n_bins = cfg_.n_fft / 2 + 1;
  FeatureMap out{Matrix(cfg_.n_filters, n_frames), FeatureRole::kPreCompressionEnergy};

  std::vector<double> frame(cfg_.win_len);
  for (std::size_t t = 0; t < n_frames; ++t) {
    const double* src = w.samples.data() + t * cfg_.hop;
    for (std::size_t i = 0; i < cfg_.win_len; ++i) frame[i] = src[i] * window_.taps[i];
    const std::vector<double> power = power_spectrum(fft_, frame);
    for (std::size_t n = 0; n < cfg_.n_filters; ++n) {
      const auto weights = fb_.weights.row(n);
      double acc = 0.0;
      for (std::size_t k = 0; k < n_bins; ++k) acc += weights[k] * power[k];
      out.values(n, t) = acc;
    }
  }
  return out;
}

FeatureMap MelAnalyzer::log_features(const Waveform& w) const {
  return log1p_compress(energies(w));
}

FeatureMap log_mel_features(const Waveform& w, const MelConfig& cfg) {
  return MelAnalyzer(cfg).log_features(w);
}

FeatureMap log1p_compress(const FeatureMap& fm) {
  FeatureMap out{fm.values, FeatureRole::kLogMel};
  for (double& v : out.values.values()) v = std::log1p(v);
  return out;
}

FeatureMap mean_variance_normalize(const FeatureMap& fm) {
  const std::size_t frames = fm.frames();
  if (frames < 2) throw std::invalid_argument("mean_variance_normalize: need >= 2 frames");
  FeatureMap out = fm;
  for (std::size_t c = 0; c < fm.channels(); ++c) {
    auto row = out.values.row(c);
    double mean = 0.0;
    for (double v : row) mean += v;
    mean /= static_cast<double>(frames);
    double var = 0.0;
    for (double v : row) var += (v - mean) * (v - mean);
    const double sd = std::sqrt(var / static_cast<double>(frames));
    const double scale = sd < 1e-8 ? 1.0 : 1.0 / sd;
    for (double& v : row) v = (v - mean) * scale;
  }
  return out;
}

std::vector<double> channel_correlations(const FeatureMap& a, const FeatureMap& b) {
  require_shape(b.values, a.channels(), a.frames(), "channel_correlations");
  const auto n = static_cast<double>(a.frames());
  std::vector<double> out(a.channels());
  for (std::size_t c = 0; c < a.channels(); ++c) {
    const auto x = a.values.row(c);
    const auto y = b.values.row(c);
    double mx = 0.0, my = 0.0;
    for (std::size_t t = 0; t < x.size(); ++t) {
      mx += x[t];
      my += y[t];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t t = 0; t < x.size(); ++t) {
      sxy += (x[t] - mx) * (y[t] - my);
      sxx += (x[t] - mx) * (x[t] - mx);
      syy += (y[t] - my) * (y[t] - my);
    }
    out[c] = (sxx > 0.0 && syy > 0.0) ? sxy / std::sqrt(sxx * syy) : std::nan("");
  }
  return out;
}

}  // namespace wavefront
