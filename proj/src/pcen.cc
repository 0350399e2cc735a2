// src/pcen.cc

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

#include "wavefront/pcen.h"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "wavefront/error.h"

namespace wavefront {
namespace {

double sign_of(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

// b^e * ln(b), with the b = 0 limit (e > 0) taken as 0.
double pow_log(double base, double expo) {
  return base > 0.0 ? std::pow(base, expo) * std::log(base) : 0.0;
}

void require_row(const Matrix& m, std::size_t channels, const char* what) {
  require_shape(m, 1, channels, what);
}

}  // namespace

std::string PcenLearnMask::to_string() const {
  std::string out;
  auto add = [&](bool on, const char* name) {
    if (!on) return;
    if (!out.empty()) out += ',';
    out += name;
  };
  add(r, "r");
  add(alpha, "alpha");
  add(delta, "delta");
  return out.empty() ? "none" : out;
}

PcenLearnMask PcenLearnMask::parse(const std::string& text) {
  PcenLearnMask m{false, false, false};
  if (text.empty() || text == "none") return m;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item == "r") {
      m.r = true;
    } else if (item == "alpha") {
      m.alpha = true;
    } else if (item == "delta") {
      m.delta = true;
    } else {
      throw std::invalid_argument("unknown PCEN parameter '" + item +
                                  "' (expected r, alpha, delta)");
    }
  }
  return m;
}

PcenParams init_pcen_params(std::size_t channels, double r, double alpha, double delta,
                            PcenLearnMask learn) {
  if (channels == 0) throw std::invalid_argument("init_pcen_params: channels must be >= 1");
  PcenParams p;
  p.alpha = Matrix(1, channels, alpha);
  p.delta = Matrix(1, channels, delta);
  p.r = Matrix(1, channels, r);
  p.learn = learn;
  return p;
}

FeatureMap smoother(const FeatureMap& energies, double s) {
  if (!(s > 0.0 && s <= 1.0)) throw std::invalid_argument("smoother: s must be in (0, 1]");
  const Matrix& E = energies.values;
  for (std::size_t i = 0; i < E.size(); ++i) {
    if (E[i] < 0.0) throw std::invalid_argument("smoother: energies must be non-negative");
  }
  FeatureMap out{Matrix(E.rows(), E.cols()), FeatureRole::kPreCompressionEnergy};
  for (std::size_t c = 0; c < E.rows(); ++c) {
    if (E.cols() == 0) break;
    out.values(c, 0) = E(c, 0);
    for (std::size_t t = 1; t < E.cols(); ++t) {
      out.values(c, t) = (1.0 - s) * out.values(c, t - 1) + s * E(c, t);
    }
  }
  return out;
}

FeatureMap pcen_forward(const FeatureMap& energies, const PcenParams& p, PcenCache* cache) {
  const std::size_t C = energies.channels();
  const std::size_t T = energies.frames();
  if (p.channels() != C) throw std::invalid_argument("pcen_forward: channel count mismatch");
  require_row(p.delta, C, "pcen delta");
  require_row(p.r, C, "pcen r");
  if (!(p.epsilon > 0.0)) throw std::invalid_argument("pcen_forward: epsilon must be > 0");

  const FeatureMap M = smoother(energies, p.s);
  const Matrix& E = energies.values;
  FeatureMap out{Matrix(C, T), FeatureRole::kPcenOut};
  Matrix gain(C, T);
  for (std::size_t c = 0; c < C; ++c) {
    const double alpha = p.alpha[c];
    const double delta = std::max(p.delta[c], 0.0);
    const double rho = std::abs(p.r[c]);
    const double offset = std::pow(delta, rho);
    for (std::size_t t = 0; t < T; ++t) {
      const double g = E(c, t) * std::pow(p.epsilon + M.values(c, t), -alpha);
      const double y = std::pow(g + delta, rho) - offset;
      if (!std::isfinite(y)) {
        throw NumericError("pcen_forward: non-finite output at channel " + std::to_string(c) +
                           ", frame " + std::to_string(t));
      }
      gain(c, t) = g;
      out.values(c, t) = y;
    }
  }
  if (cache != nullptr) {
    cache->energy = E;
    cache->smoothed = M.values;
    cache->gain = std::move(gain);
  }
  return out;
}

PcenGradients pcen_backward(const Matrix& grad_out, const PcenParams& p, const PcenCache& cache) {
  const std::size_t C = cache.energy.rows();
  const std::size_t T = cache.energy.cols();
  if (!grad_out.same_shape(cache.energy) || p.channels() != C) {
    throw std::invalid_argument("pcen_backward: shape mismatch between gradient and cache");
  }
  PcenGradients g{Matrix(C, T), Matrix(1, C), Matrix(1, C), Matrix(1, C)};
  std::vector<double> grad_m(T);
  for (std::size_t c = 0; c < C; ++c) {
    const double alpha = p.alpha[c];
    const bool delta_active = p.delta[c] > 0.0;
    const double delta = std::max(p.delta[c], 0.0);
    const double rho = std::abs(p.r[c]);
    const double delta_pow_m1 = delta_active ? std::pow(delta, rho - 1.0) : 0.0;
    double g_alpha = 0.0, g_delta = 0.0, g_rho = 0.0;
    for (std::size_t t = 0; t < T; ++t) {
      const double go = grad_out(c, t);
      const double gain = cache.gain(c, t);
      const double base = gain + delta;
      const double denom = p.epsilon + cache.smoothed(c, t);
      const double dy_dgain = base > 0.0 ? rho * std::pow(base, rho - 1.0) : 0.0;
      if (delta_active) g_delta += go * (dy_dgain - rho * delta_pow_m1);
      g_rho += go * (pow_log(base, rho) - pow_log(delta, rho));
      const double g_gain = go * dy_dgain;
      g_alpha += -g_gain * gain * std::log(denom);
      g.energy(c, t) = g_gain * std::pow(denom, -alpha);
      grad_m[t] = -g_gain * alpha * gain / denom;
    }
    // Back through M(t) = (1 - s) M(t - 1) + s E(t), M(0) = E(0).
    for (std::size_t t = T; t-- > 1;) {
      g.energy(c, t) += p.s * grad_m[t];
      grad_m[t - 1] += (1.0 - p.s) * grad_m[t];
    }
    if (T > 0) g.energy(c, 0) += grad_m[0];

    g.alpha[c] = p.learn.alpha ? g_alpha : 0.0;
    g.delta[c] = p.learn.delta ? g_delta : 0.0;
    g.r[c] = p.learn.r ? g_rho * sign_of(p.r[c]) : 0.0;
  }
  return g;
}

std::vector<CompressionRow> compression_report(const PcenParams& p) {
  std::vector<CompressionRow> rows;
  rows.reserve(p.channels());
  for (std::size_t c = 0; c < p.channels(); ++c) {
    rows.push_back({c, std::abs(p.r[c]), p.alpha[c], p.delta[c]});
  }
  return rows;
}

}  // namespace wavefront
