// src/tdfb.cc

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

#include "wavefront/tdfb.h"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace wavefront {
namespace {

using cplx = std::complex<double>;

std::size_t block_size_for(std::size_t width) {
  return std::max<std::size_t>(8, next_power_of_two(4 * width));
}

// a *= b, elementwise.
void multiply_spectra(std::span<cplx> a, std::span<const cplx> b) {
  auto* pa = reinterpret_cast<double*>(a.data());
  const auto* pb = reinterpret_cast<const double*>(b.data());
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double ar = pa[2 * i], ai = pa[2 * i + 1];
    const double br = pb[2 * i], bi = pb[2 * i + 1];
    pa[2 * i] = ar * br - ai * bi;
    pa[2 * i + 1] = ar * bi + ai * br;
  }
}

// acc += a * b, elementwise.
void accumulate_product(std::span<cplx> acc, std::span<const cplx> a, std::span<const cplx> b) {
  auto* pc = reinterpret_cast<double*>(acc.data());
  const auto* pa = reinterpret_cast<const double*>(a.data());
  const auto* pb = reinterpret_cast<const double*>(b.data());
  for (std::size_t i = 0; i < acc.size(); ++i) {
    const double ar = pa[2 * i], ai = pa[2 * i + 1];
    const double br = pb[2 * i], bi = pb[2 * i + 1];
    pc[2 * i] += ar * br - ai * bi;
    pc[2 * i + 1] += ar * bi + ai * br;
  }
}

}  // namespace

GaborParams gabor_params_from_mel(const MelFilterbankMatrix& fb,
                                  std::size_t analysis_window_len) {
  if (analysis_window_len < 2) {
    throw std::invalid_argument("gabor_params_from_mel: analysis window needs >= 2 taps");
  }
  const double sr = static_cast<double>(fb.sample_rate);
  const double span = static_cast<double>(analysis_window_len - 1);
  const double window_var = sr * sr / (3.0 * span * span);

  GaborParams p;
  p.sample_rate = fb.sample_rate;
  for (std::size_t n = 0; n < fb.num_filters(); ++n) {
    const double lo = fb.lower_edge_hz(n);
    const double mid = fb.center_freqs_hz[n];
    const double hi = fb.upper_edge_hz(n);
    if (!(hi - lo > 0.0)) {
      throw std::invalid_argument("gabor_params_from_mel: filter " + std::to_string(n) +
                                  " has zero width");
    }
    // Variance of the triangular density on [lo, hi] with mode mid.
    const double tri_var =
        (lo * lo + mid * mid + hi * hi - lo * mid - lo * hi - mid * hi) / 18.0;
    // Power response exp(-4 pi^2 sigma^2 f^2) has variance 1 / (8 pi^2 sigma^2).
    const double sigma =
        1.0 / (2.0 * std::numbers::pi * std::sqrt(2.0 * (tri_var + window_var)));
    p.center_freqs_hz.push_back(mid);
    p.sigmas_s.push_back(sigma);
  }
  return p;
}

std::vector<cplx> gabor_impulse_response(const GaborParams& p, std::size_t n,
                                         std::size_t width) {
  if (n >= p.size()) throw std::out_of_range("gabor_impulse_response: filter index");
  if (width == 0) throw std::invalid_argument("gabor_impulse_response: width must be >= 1");
  const double sr = static_cast<double>(p.sample_rate);
  const double sigma = p.sigmas_s[n] * sr;  // in samples
  const double omega = 2.0 * std::numbers::pi * p.center_freqs_hz[n] / sr;
  const double norm = 1.0 / (std::sqrt(2.0 * std::numbers::pi) * sigma);
  const std::ptrdiff_t center = static_cast<std::ptrdiff_t>((width - 1) / 2);
  std::vector<cplx> taps(width);
  for (std::size_t k = 0; k < width; ++k) {
    const double t = static_cast<double>(static_cast<std::ptrdiff_t>(k) - center);
    const double env = norm * std::exp(-t * t / (2.0 * sigma * sigma));
    taps[k] = env * cplx(std::cos(omega * t), std::sin(omega * t));
  }
  return taps;
}

double mel_matched_gain(const MelConfig& mel) {
  const Window hann = hanning_window(mel.win_len);
  double sum_sq = 0.0;
  for (double v : hann.taps) sum_sq += v * v;
  return std::sqrt(static_cast<double>(mel.n_fft) * sum_sq);
}

TdfbParams make_tdfb_params(Matrix conv_taps, std::size_t lowpass_width, std::size_t stride,
                            bool apply_log, int sample_rate) {
  if (conv_taps.rows() == 0 || conv_taps.rows() % 2 != 0 || conv_taps.cols() == 0) {
    throw std::invalid_argument("make_tdfb_params: conv_taps must be 2N x width");
  }
  if (stride == 0 || lowpass_width == 0) {
    throw std::invalid_argument("make_tdfb_params: stride and lowpass width must be >= 1");
  }
  TdfbParams p;
  p.conv_taps = std::move(conv_taps);
  p.lowpass = squared_hanning_window(lowpass_width).taps;
  double sum = 0.0;
  for (double v : p.lowpass) sum += v;
  for (double& v : p.lowpass) v /= sum;
  p.stride = stride;
  p.apply_log = apply_log;
  p.sample_rate = sample_rate;
  return p;
}

TdfbParams init_tdfb_params(const TdfbConfig& cfg, const MelConfig& mel) {
  if (cfg.n_filters != mel.n_filters) {
    throw std::invalid_argument("init_tdfb_params: filter count differs from mel config");
  }
  const MelFilterbankMatrix fb =
      mel_filterbank_matrix(mel.n_filters, mel.n_fft, mel.sample_rate, mel.f_min, mel.f_max);
  const GaborParams gabor = gabor_params_from_mel(fb, mel.win_len);
  const double gain = mel_matched_gain(mel);
  Matrix taps(2 * cfg.n_filters, cfg.width);
  for (std::size_t n = 0; n < cfg.n_filters; ++n) {
    const auto h = gabor_impulse_response(gabor, n, cfg.width);
    for (std::size_t k = 0; k < cfg.width; ++k) {
      taps(2 * n, k) = gain * h[k].real();
      taps(2 * n + 1, k) = gain * h[k].imag();
    }
  }
  TdfbParams p =
      make_tdfb_params(std::move(taps), cfg.lowpass_width, cfg.stride, cfg.apply_log,
                       cfg.sample_rate);
  p.init_center_freqs_hz = fb.center_freqs_hz;
  return p;
}

FeatureMap tdfb_forward(const Waveform& w, const TdfbParams& p, TdfbCache* cache) {
  const std::size_t T = w.samples.size();
  const std::size_t W = p.width();
  const std::size_t N = p.num_filters();
  const std::size_t LW = p.lowpass.size();
  if (N == 0 || W == 0) throw std::invalid_argument("tdfb_forward: empty parameters");
  if (T < LW) {
    throw std::invalid_argument("tdfb_forward: waveform of " + std::to_string(T) +
                                " samples is shorter than the lowpass width " +
                                std::to_string(LW));
  }
  const std::size_t center = (W - 1) / 2;
  const std::size_t B = block_size_for(W);
  const std::size_t L = B - W + 1;
  const std::size_t n_blocks = (T + L - 1) / L;
  const Fft fft(B);

  // Spectra of the overlapping input segments; segment b covers
  // x[b L + center - W + 1, b L + center - W + 1 + B).
  std::vector<std::vector<cplx>> blocks(n_blocks, std::vector<cplx>(B));
  for (std::size_t b = 0; b < n_blocks; ++b) {
    const std::ptrdiff_t first = static_cast<std::ptrdiff_t>(b * L + center) -
                                 static_cast<std::ptrdiff_t>(W - 1);
    for (std::size_t j = 0; j < B; ++j) {
      const std::ptrdiff_t s = first + static_cast<std::ptrdiff_t>(j);
      if (s >= 0 && s < static_cast<std::ptrdiff_t>(T)) blocks[b][j] = w.samples[s];
    }
    fft.forward(blocks[b]);
  }

  std::vector<std::vector<cplx>> filtered(N, std::vector<cplx>(T));
  std::vector<cplx> kernel(B), work(B);
  for (std::size_t n = 0; n < N; ++n) {
    std::fill(kernel.begin(), kernel.end(), cplx{});
    for (std::size_t k = 0; k < W; ++k) kernel[k] = {p.conv_taps(2 * n, k), p.conv_taps(2 * n + 1, k)};
    fft.forward(kernel);
    for (std::size_t b = 0; b < n_blocks; ++b) {
      std::copy(blocks[b].begin(), blocks[b].end(), work.begin());
      multiply_spectra(work, kernel);
      fft.inverse(work);
      const std::size_t t0 = b * L;
      const std::size_t count = std::min(L, T - t0);
      std::copy_n(work.begin() + static_cast<std::ptrdiff_t>(W - 1), count,
                  filtered[n].begin() + static_cast<std::ptrdiff_t>(t0));
    }
  }

  const std::size_t K = num_frames(T, LW, p.stride);
  FeatureMap out{Matrix(N, K), FeatureRole::kTdfbOut};
  Matrix pooled(N, K);
  std::vector<double> energy(T);
  for (std::size_t n = 0; n < N; ++n) {
    for (std::size_t t = 0; t < T; ++t) energy[t] = std::norm(filtered[n][t]);
    for (std::size_t k = 0; k < K; ++k) {
      const double* e = energy.data() + k * p.stride;
      double acc = 0.0;
      for (std::size_t j = 0; j < LW; ++j) acc += p.lowpass[j] * e[j];
      pooled(n, k) = acc;
      const double mag = std::abs(acc);
      out.values(n, k) = p.apply_log ? std::log1p(mag) : mag;
    }
  }
  if (!p.apply_log) out.role = FeatureRole::kPreCompressionEnergy;

  if (cache != nullptr) {
    cache->input = w.samples;
    cache->filtered = std::move(filtered);
    cache->input_blocks = std::move(blocks);
    cache->pooled = std::move(pooled);
    cache->block_size = B;
    cache->n_filters = N;
    cache->width = W;
    cache->apply_log = p.apply_log;
  }
  return out;
}

TdfbGradients tdfb_backward(const Matrix& grad_out, const TdfbParams& p, const TdfbCache& cache,
                            bool want_input_grad) {
  const std::size_t N = p.num_filters();
  const std::size_t W = p.width();
  const std::size_t T = cache.input.size();
  const std::size_t LW = p.lowpass.size();
  if (cache.n_filters != N || cache.width != W || cache.filtered.size() != N ||
      cache.apply_log != p.apply_log) {
    throw std::invalid_argument("tdfb_backward: cache does not match parameters");
  }
  if (!grad_out.same_shape(cache.pooled)) {
    throw std::invalid_argument("tdfb_backward: gradient shape does not match forward output");
  }
  const std::size_t K = grad_out.cols();
  const std::size_t center = (W - 1) / 2;
  const std::size_t B = cache.block_size;
  const std::size_t L = B - W + 1;
  const std::size_t n_blocks = cache.input_blocks.size();
  const Fft fft(B);

  TdfbGradients grads;
  grads.conv_taps = Matrix(2 * N, W);
  if (want_input_grad) grads.waveform.emplace(T, 0.0);

  std::vector<double> grad_energy(T);
  std::vector<cplx> grad_filtered(T);
  std::vector<cplx> acc(B), work(B);
  for (std::size_t n = 0; n < N; ++n) {
    // Through log(1 + |.|) and the lowpass; d|p|/dp at p = 0 is taken as 0.
    std::fill(grad_energy.begin(), grad_energy.end(), 0.0);
    for (std::size_t k = 0; k < K; ++k) {
      const double pv = cache.pooled(n, k);
      double g = grad_out(n, k);
      if (pv == 0.0) continue;
      if (p.apply_log) g /= 1.0 + std::abs(pv);
      if (pv < 0.0) g = -g;
      double* ge = grad_energy.data() + k * p.stride;
      for (std::size_t j = 0; j < LW; ++j) ge[j] += g * p.lowpass[j];
    }
    // |z|^2 = re^2 + im^2 (modulus and square fused).
    for (std::size_t t = 0; t < T; ++t) grad_filtered[t] = 2.0 * grad_energy[t] * cache.filtered[n][t];

    // Tap gradient r[k] = sum_t G[t] x[t + center - k], accumulated per block
    // in the frequency domain against the cached input spectra.
    std::fill(acc.begin(), acc.end(), cplx{});
    for (std::size_t b = 0; b < n_blocks; ++b) {
      std::fill(work.begin(), work.end(), cplx{});
      const std::size_t t0 = b * L;
      const std::size_t count = std::min(L, T - t0);
      work[0] = grad_filtered[t0];
      for (std::size_t i = 1; i < count; ++i) work[B - i] = grad_filtered[t0 + i];
      fft.forward(work);
      accumulate_product(acc, work, cache.input_blocks[b]);
    }
    fft.inverse(acc);
    for (std::size_t k = 0; k < W; ++k) {
      grads.conv_taps(2 * n, k) = acc[W - 1 - k].real();
      grads.conv_taps(2 * n + 1, k) = acc[W - 1 - k].imag();
    }

    if (want_input_grad) {
      auto& gx = *grads.waveform;
      for (std::size_t k = 0; k < W; ++k) {
        const double wr = p.conv_taps(2 * n, k);
        const double wi = p.conv_taps(2 * n + 1, k);
        // y[t] depends on x[t + center - k]; sweep s = t + center - k.
        for (std::size_t t = 0; t < T; ++t) {
          const std::ptrdiff_t s = static_cast<std::ptrdiff_t>(t + center) -
                                   static_cast<std::ptrdiff_t>(k);
          if (s < 0 || s >= static_cast<std::ptrdiff_t>(T)) continue;
          gx[static_cast<std::size_t>(s)] +=
              grad_filtered[t].real() * wr + grad_filtered[t].imag() * wi;
        }
      }
    }
  }
  return grads;
}

std::vector<CenterFrequencyRow> center_frequency_report(const TdfbParams& p, std::size_t n_fft) {
  const std::size_t W = p.width();
  const std::size_t fft_len = std::max(n_fft, next_power_of_two(W));
  const Fft fft(fft_len);
  const double bin_hz = static_cast<double>(p.sample_rate) / static_cast<double>(fft_len);
  std::vector<CenterFrequencyRow> rows;
  std::vector<cplx> buf(fft_len);
  for (std::size_t n = 0; n < p.num_filters(); ++n) {
    std::fill(buf.begin(), buf.end(), cplx{});
    for (std::size_t k = 0; k < W; ++k) buf[k] = {p.conv_taps(2 * n, k), p.conv_taps(2 * n + 1, k)};
    fft.forward(buf);
    std::size_t best = 0;
    double best_power = -1.0;
    for (std::size_t k = 0; k <= fft_len / 2; ++k) {
      double power = std::norm(buf[k]);
      if (k != 0 && k != fft_len / 2) power += std::norm(buf[fft_len - k]);
      if (power > best_power) {
        best_power = power;
        best = k;
      }
    }
    const double init =
        n < p.init_center_freqs_hz.size() ? p.init_center_freqs_hz[n] : std::nan("");
    rows.push_back({n, bin_hz * static_cast<double>(best), init});
  }
  return rows;
}

}  // namespace wavefront
