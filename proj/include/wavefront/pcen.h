// include/wavefront/pcen.h

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

#ifndef WAVEFRONT_PCEN_H_
#define WAVEFRONT_PCEN_H_

#include <cstddef>
#include <string>
#include <vector>

#include "wavefront/matrix.h"
#include "wavefront/melfb.h"

namespace wavefront {

/// Which per-channel PCEN tensors receive updates.
struct PcenLearnMask {
  bool r = true;
  bool alpha = true;
  bool delta = true;

  bool any() const { return r || alpha || delta; }
  /// Canonical "r,alpha,delta" order; "none" when empty.
  std::string to_string() const;
  /// Parses a comma-separated subset of {r, alpha, delta}; "none" or "" is empty.
  static PcenLearnMask parse(const std::string& text);

  friend bool operator==(const PcenLearnMask&, const PcenLearnMask&) = default;
};

struct PcenParams {
  Matrix alpha;  // 1 x channels
  Matrix delta;  // 1 x channels, clamped at >= 0 when applied
  Matrix r;      // 1 x channels, |r| is used
  double s = 0.5;
  double epsilon = 1e-6;
  PcenLearnMask learn;

  std::size_t channels() const { return alpha.cols(); }
};

/// Constant initialization; the defaults are r = 0.5, alpha = 0.98, delta = 2.
PcenParams init_pcen_params(std::size_t channels, double r = 0.5, double alpha = 0.98,
                            double delta = 2.0, PcenLearnMask learn = {});

/// Causal smoother M(t) = (1 - s) M(t - 1) + s E(t) with M(0) = E(0).
/// E must be non-negative.
FeatureMap smoother(const FeatureMap& energies, double s);

struct PcenCache {
  Matrix energy;    // E
  Matrix smoothed;  // M
  Matrix gain;      // E / (eps + M)^alpha
};

struct PcenGradients {
  Matrix energy;  // channels x frames
  Matrix alpha;   // 1 x channels; zero where frozen
  Matrix delta;
  Matrix r;
};

/// (E / (eps + M)^alpha + delta)^|r| - delta^|r|, per channel.
/// Throws NumericError naming channel and frame on a non-finite result.
FeatureMap pcen_forward(const FeatureMap& energies, const PcenParams& p,
                        PcenCache* cache = nullptr);

PcenGradients pcen_backward(const Matrix& grad_out, const PcenParams& p, const PcenCache& cache);

struct CompressionRow {
  std::size_t channel = 0;
  double r_abs = 0.0;
  double alpha = 0.0;
  double delta = 0.0;
};

std::vector<CompressionRow> compression_report(const PcenParams& p);

}  // namespace wavefront

#endif  // WAVEFRONT_PCEN_H_
