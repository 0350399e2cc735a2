// tests/test_dsp.cc

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

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "wavefront/dsp.h"
#include "wavefront/rng.h"

using namespace wavefront;

namespace {

std::vector<double> naive_power(const std::vector<double>& x, std::size_t n) {
  std::vector<double> out(n / 2 + 1);
  for (std::size_t k = 0; k <= n / 2; ++k) {
    std::complex<double> acc = 0.0;
    for (std::size_t t = 0; t < x.size(); ++t) {
      acc += x[t] * std::polar(1.0, -2.0 * std::numbers::pi * k * t / n);
    }
    out[k] = std::norm(acc);
  }
  return out;
}

Waveform random_wave(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  Waveform w;
  for (std::size_t i = 0; i < n; ++i) w.samples.push_back(rng.normal());
  return w;
}

}  // namespace

TEST_CASE("hanning window values") {
  CHECK(hanning_window(1).taps == std::vector<double>{1.0});
  const auto w3 = hanning_window(3).taps;
  REQUIRE(w3.size() == 3);
  CHECK(w3[0] == 0.0);
  CHECK(w3[1] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(w3[2] == 0.0);
  const std::vector<double> expect5 = {0.0, 0.5, 1.0, 0.5, 0.0};
  const auto w5 = hanning_window(5).taps;
  for (std::size_t i = 0; i < 5; ++i) CHECK(std::abs(w5[i] - expect5[i]) < 1e-15);
  CHECK_THROWS_AS(hanning_window(0), std::invalid_argument);
}

TEST_CASE("hanning window is symmetric and bounded") {
  for (std::size_t n : {2u, 7u, 400u, 401u}) {
    const auto w = hanning_window(n).taps;
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(w[i] == w[n - 1 - i]);
      CHECK(w[i] >= 0.0);
      CHECK(w[i] <= 1.0);
    }
  }
}

TEST_CASE("squared hanning window squares taps") {
  const auto h = hanning_window(9).taps;
  const auto s = squared_hanning_window(9);
  CHECK(s.kind == WindowKind::kSquaredHanning);
  for (std::size_t i = 0; i < 9; ++i) CHECK(s.taps[i] == doctest::Approx(h[i] * h[i]));
}

TEST_CASE("preemphasis formula") {
  Waveform w{{1, 1, 1}, 16000};
  auto out = preemphasis(w, 0.97).samples;
  CHECK(out[0] == 1.0);
  CHECK(out[1] == doctest::Approx(0.03).epsilon(1e-12));
  CHECK(out[2] == doctest::Approx(0.03).epsilon(1e-12));
  out = preemphasis(Waveform{{0, 1, 0}, 16000}, 0.97).samples;
  CHECK(out == std::vector<double>{0.0, 1.0, -0.97});
  const Waveform r = random_wave(50, 1);
  CHECK(preemphasis(r, 0.0).samples == r.samples);
  CHECK_THROWS_AS(preemphasis(r, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(preemphasis(r, -0.1), std::invalid_argument);
}

TEST_CASE("preemphasis is linear") {
  const Waveform x = random_wave(200, 2), y = random_wave(200, 3);
  const double a = 1.7, b = -0.4;
  Waveform mix;
  for (std::size_t i = 0; i < 200; ++i) mix.samples.push_back(a * x.samples[i] + b * y.samples[i]);
  const auto lhs = preemphasis(mix, 0.97).samples;
  const auto px = preemphasis(x, 0.97).samples, py = preemphasis(y, 0.97).samples;
  for (std::size_t i = 0; i < 200; ++i) CHECK(std::abs(lhs[i] - (a * px[i] + b * py[i])) < 1e-12);
}

TEST_CASE("frame counts") {
  CHECK(num_frames(40000, 400, 160) == 248);
  CHECK(num_frames(400, 400, 160) == 1);
  CHECK(num_frames(560, 400, 160) == 2);
  CHECK(num_frames(399, 400, 160) == 0);
  Waveform w;
  w.samples.assign(40000, 0.0);
  CHECK(frame_signal(w, 400, 160).size() == 248);
  w.samples.assign(399, 0.0);
  CHECK_THROWS_AS(frame_signal(w, 400, 160), std::invalid_argument);
}

TEST_CASE("frames overlaid at their offsets reproduce the covered prefix") {
  const Waveform w = random_wave(1000, 4);
  const auto frames = frame_signal(w, 400, 160);
  std::vector<double> rebuilt(w.samples.size(), std::nan(""));
  for (std::size_t k = 0; k < frames.size(); ++k) {
    REQUIRE(frames[k].size() == 400);
    for (std::size_t i = 0; i < 400; ++i) rebuilt[k * 160 + i] = frames[k][i];
  }
  const std::size_t covered = (frames.size() - 1) * 160 + 400;
  for (std::size_t i = 0; i < covered; ++i) CHECK(rebuilt[i] == w.samples[i]);
}

TEST_CASE("power spectrum closed cases") {
  CHECK(power_spectrum(std::vector<double>{1, 0, 0, 0}, 4) == std::vector<double>{1, 1, 1});
  CHECK(power_spectrum(std::vector<double>{1, 1, 1, 1}, 4) == std::vector<double>{16, 0, 0});
  CHECK_THROWS_AS(power_spectrum(std::vector<double>{1, 2, 3}, 6), std::invalid_argument);
}

TEST_CASE("power spectrum matches a naive DFT") {
  for (std::size_t n : {8u, 64u, 512u}) {
    const auto x = random_wave(n == 512 ? 400 : n, n).samples;
    const auto fast = power_spectrum(x, n);
    const auto slow = naive_power(x, n);
    REQUIRE(fast.size() == n / 2 + 1);
    for (std::size_t k = 0; k < fast.size(); ++k) {
      CHECK(std::abs(fast[k] - slow[k]) <= 1e-10 * std::max(1.0, slow[k]));
    }
  }
}

TEST_CASE("power spectrum satisfies Parseval") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const std::size_t n = 256;
    const auto x = random_wave(n, seed).samples;
    const auto p = power_spectrum(x, n);
    double total = p.front() + p.back();
    for (std::size_t k = 1; k < n / 2; ++k) total += 2.0 * p[k];
    double energy = 0.0;
    for (double v : x) energy += v * v;
    CHECK(std::abs(total - n * energy) <= 1e-9 * n * energy);
  }
}

TEST_CASE("fft inverse round trip") {
  const Fft fft(64);
  Rng rng(9);
  std::vector<std::complex<double>> x(64), y;
  for (auto& v : x) v = {rng.normal(), rng.normal()};
  y = x;
  fft.forward(y);
  fft.inverse(y);
  for (std::size_t i = 0; i < 64; ++i) CHECK(std::abs(y[i] - x[i]) < 1e-12);
  CHECK_THROWS_AS(Fft(12), std::invalid_argument);
}

TEST_CASE("power of two helpers") {
  CHECK(is_power_of_two(1));
  CHECK(is_power_of_two(512));
  CHECK_FALSE(is_power_of_two(0));
  CHECK_FALSE(is_power_of_two(400));
  CHECK(next_power_of_two(400) == 512);
  CHECK(next_power_of_two(512) == 512);
  CHECK(next_power_of_two(1) == 1);
}

TEST_CASE("waveform validation") {
  CHECK_THROWS_AS(validate_waveform(Waveform{{}, 16000}), std::invalid_argument);
  CHECK_THROWS_AS(validate_waveform(Waveform{{0.0}, 0}), std::invalid_argument);
  CHECK_THROWS_AS(validate_waveform(Waveform{{std::nan("")}, 16000}), std::invalid_argument);
  CHECK_NOTHROW(validate_waveform(Waveform{{0.5}, 16000}));
}
