// tests/test_melfb.cc

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

#include <algorithm>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "wavefront/melfb.h"
#include "wavefront/rng.h"

using namespace wavefront;

namespace {

Waveform tone(double hz, std::size_t n = 40000, double amp = 0.5) {
  Waveform w;
  for (std::size_t i = 0; i < n; ++i) {
    w.samples.push_back(amp * std::sin(2.0 * std::numbers::pi * hz * i / 16000.0));
  }
  return w;
}

Waveform noise(std::size_t n, std::uint64_t seed, double scale = 0.1) {
  Rng rng(seed);
  Waveform w;
  for (std::size_t i = 0; i < n; ++i) w.samples.push_back(scale * rng.normal());
  return w;
}

}  // namespace

TEST_CASE("mel scale values") {
  CHECK(mel_scale(0.0) == 0.0);
  CHECK(mel_scale(700.0) == doctest::Approx(2595.0 * std::log10(2.0)).epsilon(1e-14));
  CHECK(std::abs(mel_scale(700.0) - 781.1728) < 1e-4);
  CHECK(std::abs(mel_scale_inv(mel_scale(4000.0)) - 4000.0) < 1e-9);
  CHECK_THROWS_AS(mel_scale(-1.0), std::invalid_argument);
  CHECK_THROWS_AS(mel_scale_inv(-1.0), std::invalid_argument);
}

TEST_CASE("64-filter matrix shape and structure") {
  const auto fb = mel_filterbank_matrix(64, 512, 16000, 0.0, 8000.0);
  CHECK(fb.weights.rows() == 64);
  CHECK(fb.weights.cols() == 257);
  CHECK(fb.bin_width_hz() == 31.25);
  REQUIRE(fb.center_freqs_hz.size() == 64);
  for (std::size_t n = 1; n < 64; ++n) CHECK(fb.center_freqs_hz[n] > fb.center_freqs_hz[n - 1]);
  std::size_t prev_peak = 0;
  for (std::size_t n = 0; n < 64; ++n) {
    const auto row = fb.weights.row(n);
    double sum = 0.0;
    std::size_t first = row.size(), last = 0, peak = 0;
    for (std::size_t k = 0; k < row.size(); ++k) {
      CHECK(row[k] >= 0.0);
      sum += row[k];
      if (row[k] > 0.0) {
        first = std::min(first, k);
        last = k;
      }
      if (row[k] > row[peak]) peak = k;
    }
    CHECK(sum > 0.0);
    for (std::size_t k = first; k <= last; ++k) CHECK(row[k] > 0.0);  // one contiguous support
    if (n > 0) CHECK(peak > prev_peak);
    prev_peak = peak;
  }
  CHECK_THROWS_AS(mel_filterbank_matrix(64, 512, 16000, 0.0, 8001.0), std::invalid_argument);
}

TEST_CASE("filter peaks sit on an independently recomputed mel grid") {
  const auto fb = mel_filterbank_matrix(64, 512, 16000, 0.0, 8000.0);
  const double top = 2595.0 * std::log10(1.0 + 8000.0 / 700.0);
  for (std::size_t n = 0; n < 64; ++n) {
    const double m = top * static_cast<double>(n + 1) / 65.0;
    const double hz = 700.0 * (std::pow(10.0, m / 2595.0) - 1.0);
    const auto row = fb.weights.row(n);
    const auto peak = static_cast<std::size_t>(std::max_element(row.begin(), row.end()) - row.begin());
    CHECK(std::abs(peak * 31.25 - hz) <= 31.25);
    CHECK(fb.center_freqs_hz[n] == doctest::Approx(hz).epsilon(1e-9));
  }
}

TEST_CASE("log-mel of silence is exactly zero and has the 64x248 shape") {
  Waveform w;
  w.samples.assign(40000, 0.0);
  const FeatureMap f = log_mel_features(w);
  CHECK(f.channels() == 64);
  CHECK(f.frames() == 248);
  CHECK(f.role == FeatureRole::kLogMel);
  for (double v : f.values.values()) CHECK(v == 0.0);
  w.samples.assign(399, 0.0);
  CHECK_THROWS_AS(log_mel_features(w), std::invalid_argument);
}

TEST_CASE("a 2 kHz tone peaks in the filter nearest 2 kHz in every frame") {
  const MelAnalyzer mel;
  const auto& centers = mel.filterbank().center_freqs_hz;
  std::size_t nearest = 0;
  for (std::size_t n = 0; n < centers.size(); ++n) {
    if (std::abs(centers[n] - 2000.0) < std::abs(centers[nearest] - 2000.0)) nearest = n;
  }
  const FeatureMap f = mel.log_features(tone(2000.0));
  for (std::size_t t = 0; t < f.frames(); ++t) {
    std::size_t best = 0;
    for (std::size_t c = 0; c < f.channels(); ++c) {
      if (f.values(c, t) > f.values(best, t)) best = c;
    }
    CHECK(best == nearest);
  }
}

TEST_CASE("energies and log features agree") {
  const MelAnalyzer mel;
  const Waveform w = noise(8000, 5);
  const FeatureMap e = mel.energies(w);
  CHECK(e.role == FeatureRole::kPreCompressionEnergy);
  const FeatureMap l = mel.log_features(w);
  for (std::size_t i = 0; i < e.values.size(); ++i) {
    CHECK(e.values[i] >= 0.0);
    CHECK(l.values[i] == doctest::Approx(std::log1p(e.values[i])).epsilon(1e-14));
  }
}

TEST_CASE("log-mel is monotone under amplitude scaling") {
  const Waveform w = noise(8000, 6);
  Waveform louder = w;
  for (double& s : louder.samples) s *= 1.5;
  const FeatureMap a = log_mel_features(w), b = log_mel_features(louder);
  for (std::size_t i = 0; i < a.values.size(); ++i) CHECK(b.values[i] >= a.values[i]);
}

TEST_CASE("mean variance normalization") {
  FeatureMap f{Matrix(2, 3), FeatureRole::kLogMel};
  f.values(0, 0) = 1;
  f.values(0, 1) = 2;
  f.values(0, 2) = 3;
  f.values(1, 0) = f.values(1, 1) = f.values(1, 2) = 5;
  const FeatureMap g = mean_variance_normalize(f);
  const double s = std::sqrt(1.5);
  CHECK(g.values(0, 0) == doctest::Approx(-s));
  CHECK(g.values(0, 1) == doctest::Approx(0.0));
  CHECK(g.values(0, 2) == doctest::Approx(s));
  for (std::size_t t = 0; t < 3; ++t) CHECK(g.values(1, t) == 0.0);
  CHECK_THROWS_AS(mean_variance_normalize(FeatureMap{Matrix(2, 1), FeatureRole::kLogMel}),
                  std::invalid_argument);
}

TEST_CASE("mean variance normalization gives zero mean and unit std") {
  const FeatureMap g = mean_variance_normalize(log_mel_features(noise(40000, 7)));
  for (std::size_t c = 0; c < g.channels(); ++c) {
    double mean = 0.0, var = 0.0;
    for (double v : g.values.row(c)) mean += v;
    mean /= g.frames();
    for (double v : g.values.row(c)) var += (v - mean) * (v - mean);
    CHECK(std::abs(mean) < 1e-10);
    CHECK(std::abs(std::sqrt(var / g.frames()) - 1.0) < 1e-8);
  }
}

TEST_CASE("channel correlations") {
  FeatureMap a{Matrix(2, 4), FeatureRole::kLogMel};
  FeatureMap b = a;
  for (std::size_t t = 0; t < 4; ++t) {
    a.values(0, t) = t;
    b.values(0, t) = 3.0 * t + 1.0;
    a.values(1, t) = t;
    b.values(1, t) = -static_cast<double>(t);
  }
  const auto r = channel_correlations(a, b);
  CHECK(r[0] == doctest::Approx(1.0));
  CHECK(r[1] == doctest::Approx(-1.0));
  CHECK_THROWS_AS(channel_correlations(a, FeatureMap{Matrix(2, 3), FeatureRole::kLogMel}),
                  std::invalid_argument);
}
