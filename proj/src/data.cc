// src/data.cc

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

#include "wavefront/data.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>
#include <stdexcept>

#include "wavefront/error.h"
#include "wavefront/rng.h"

namespace wavefront {
namespace fs = std::filesystem;

std::string to_string(Split s) {
  switch (s) {
    case Split::kTrain: return "train";
    case Split::kValid: return "valid";
    case Split::kTest: return "test";
  }
  return "unknown";
}

Split parse_split(const std::string& s) {
  if (s == "train") return Split::kTrain;
  if (s == "valid") return Split::kValid;
  if (s == "test") return Split::kTest;
  throw FormatError("split", "unknown split '" + s + "' (expected train, valid, test)");
}

std::string label_name(std::size_t label) {
  switch (label) {
    case 0: return "control";
    case 1: return "dysarthric";
  }
  throw std::invalid_argument("label_name: label " + std::to_string(label) + " out of range");
}

std::size_t parse_label(const std::string& name) {
  if (name == "control") return 0;
  if (name == "dysarthric") return 1;
  throw FormatError("label", "unknown label '" + name + "' (expected control, dysarthric)");
}

std::vector<Utterance> Manifest::split(Split s) const {
  std::vector<Utterance> out;
  for (const auto& r : records) {
    if (r.split == s) out.push_back(r);
  }
  return out;
}

Manifest read_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest '" + path + "'");
  const fs::path base = fs::path(path).parent_path();
  std::string line;
  if (!std::getline(in, line)) throw FormatError("header", "manifest is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "id,path,label,speaker,split") {
    throw FormatError("header", "manifest header must be 'id,path,label,speaker,split'");
  }
  Manifest m;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(f);
    if (fields.size() != 5) {
      throw FormatError("row", "manifest line " + std::to_string(line_no) + ": expected 5 fields");
    }
    Utterance u;
    u.id = fields[0];
    fs::path p(fields[1]);
    u.path = p.is_absolute() || base.empty() ? p.string() : (base / p).string();
    u.label = parse_label(fields[2]);
    u.speaker = fields[3];
    u.split = parse_split(fields[4]);
    m.records.push_back(std::move(u));
  }
  return m;
}

void write_manifest(const std::string& path, const Manifest& m) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << "id,path,label,speaker,split\n";
  for (const auto& r : m.records) {
    out << r.id << ',' << r.path << ',' << label_name(r.label) << ',' << r.speaker << ','
        << to_string(r.split) << '\n';
  }
  if (!out) throw IoError("failed writing '" + path + "'");
}

ManifestReport validate_manifest(const Manifest& m, bool check_files) {
  ManifestReport report;
  for (Split s : kAllSplits) report.counts[s] = {0, 0};
  std::map<std::string, std::set<Split>> speaker_splits;
  std::vector<std::string> missing;
  for (const auto& r : m.records) {
    if (r.label >= kNumLabels) throw ValidationError("utterance '" + r.id + "' has a bad label");
    report.counts[r.split][r.label] += 1;
    speaker_splits[r.speaker].insert(r.split);
    if (check_files && !fs::exists(r.path)) missing.push_back(r.path);
  }
  std::vector<std::string> problems;
  std::string shared;
  for (const auto& [speaker, splits] : speaker_splits) {
    if (splits.size() > 1) {
      std::string where;
      for (Split s : splits) where += (where.empty() ? "" : "+") + to_string(s);
      shared += (shared.empty() ? "" : ", ") + speaker + " (" + where + ")";
    }
  }
  if (!shared.empty()) problems.push_back("speakers shared across splits: " + shared);
  for (Split s : kAllSplits) {
    const auto& c = report.counts[s];
    if (c[0] + c[1] == 0) {
      problems.push_back("split " + to_string(s) + " is empty");
      continue;
    }
    for (std::size_t l = 0; l < kNumLabels; ++l) {
      if (c[l] == 0) problems.push_back("split " + to_string(s) + " has no " + label_name(l));
    }
  }
  if (!missing.empty()) {
    std::string list;
    for (std::size_t i = 0; i < missing.size() && i < 5; ++i) list += (i ? ", " : "") + missing[i];
    problems.push_back(std::to_string(missing.size()) + " missing file(s): " + list);
  }
  if (!problems.empty()) {
    std::string msg = "manifest validation failed";
    for (const auto& p : problems) msg += "; " + p;
    throw ValidationError(msg);
  }
  return report;
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

struct SpeakerProfile {
  std::string id;
  std::size_t label = 0;
  double gain = 1.0;
  double center_hz = 0.0;
};

}  // namespace

Waveform synthesize_utterance(const SyntheticSpec& spec, std::size_t label, double gain,
                              double center_hz, std::uint64_t seed) {
  const double sr = spec.sample_rate;
  const double nyquist = 0.5 * sr;
  if (label >= kNumLabels) throw std::invalid_argument("synthesize_utterance: bad label");
  if (!(center_hz > 0.0 && center_hz < nyquist)) {
    throw std::invalid_argument("synthesize_utterance: band center outside (0, Nyquist)");
  }
  Rng rng(seed);
  const auto length = static_cast<std::size_t>(sr * rng.uniform(1.2, 2.5));
  Waveform w{std::vector<double>(length), spec.sample_rate};
  for (double& s : w.samples) s = spec.noise_floor * rng.normal();

  // Band-limited burst: random-phase sinusoids inside the class band.
  const auto onset = static_cast<std::size_t>(rng.uniform(0.0, 0.3) * length);
  const auto burst_len =
      static_cast<std::size_t>(rng.uniform(0.5, 0.95) * static_cast<double>(length - onset));
  const std::size_t ramp = std::min<std::size_t>(320, burst_len / 2);
  constexpr int kPartials = 24;
  std::vector<double> freqs(kPartials), phases(kPartials);
  for (int k = 0; k < kPartials; ++k) {
    const double f = center_hz + spec.band_width_hz * (rng.uniform() - 0.5);
    freqs[k] = std::clamp(f, 1.0, nyquist - 1.0);
    phases[k] = 2.0 * std::numbers::pi * rng.uniform();
  }
  const double amp = gain * std::sqrt(2.0 / kPartials);
  for (std::size_t i = 0; i < burst_len; ++i) {
    double env = 1.0;
    if (i < ramp) env = 0.5 * (1.0 - std::cos(std::numbers::pi * i / ramp));
    if (burst_len - 1 - i < ramp) {
      env = std::min(env, 0.5 * (1.0 - std::cos(std::numbers::pi * (burst_len - 1 - i) / ramp)));
    }
    const double t = static_cast<double>(i) / sr;
    double v = 0.0;
    for (int k = 0; k < kPartials; ++k) {
      v += std::sin(2.0 * std::numbers::pi * freqs[k] * t + phases[k]);
    }
    w.samples[onset + i] += amp * env * v;
  }

  // Class-independent "voicing": a low harmonic series at a random f0.
  const double f0 = rng.uniform(100.0, 220.0);
  const double voice_amp = 0.3 * gain;
  for (int h = 1; h * f0 < 900.0; ++h) {
    const double phase = 2.0 * std::numbers::pi * rng.uniform();
    const double a = voice_amp / h;
    for (std::size_t i = onset; i < onset + burst_len; ++i) {
      w.samples[i] += a * std::sin(2.0 * std::numbers::pi * h * f0 * i / sr + phase);
    }
  }
  for (double& s : w.samples) s = std::clamp(s, -0.99, 0.99);
  return w;
}

Manifest generate_synthetic(const SyntheticSpec& spec, const std::string& out_dir) {
  const double nyquist = 0.5 * spec.sample_rate;
  for (double c : spec.band_centers_hz) {
    if (!(c > 0.0 && c < nyquist)) {
      throw std::invalid_argument("generate_synthetic: band center outside (0, Nyquist)");
    }
  }
  if (spec.speakers_per_class_train == 0 || spec.speakers_per_class_eval == 0) {
    throw std::invalid_argument("generate_synthetic: need at least one speaker per class");
  }
  const fs::path root(out_dir);
  std::error_code ec;
  fs::create_directories(root / "wav", ec);
  if (ec) throw IoError("cannot create '" + (root / "wav").string() + "': " + ec.message());

  Manifest m;
  std::uint64_t utt_counter = 0;
  const std::array<std::pair<Split, std::size_t>, 3> plan = {
      {{Split::kTrain, spec.n_train}, {Split::kValid, spec.n_valid}, {Split::kTest, spec.n_test}}};
  for (const auto& [split, total] : plan) {
    const std::size_t n_spk =
        split == Split::kTrain ? spec.speakers_per_class_train : spec.speakers_per_class_eval;
    std::array<std::vector<SpeakerProfile>, kNumLabels> speakers;
    for (std::size_t label = 0; label < kNumLabels; ++label) {
      for (std::size_t k = 0; k < n_spk; ++k) {
        const std::uint64_t key =
            splitmix64(spec.seed ^ splitmix64((static_cast<std::uint64_t>(split) << 32) |
                                              (label << 16) | k));
        Rng rng(key);
        SpeakerProfile sp;
        sp.id = to_string(split).substr(0, 2) + (label == 0 ? "C" : "D") +
                (k < 9 ? "0" : "") + std::to_string(k + 1);
        sp.label = label;
        sp.gain = spec.min_gain * std::pow(spec.max_gain / spec.min_gain, rng.uniform());
        sp.center_hz = spec.band_centers_hz[label] + spec.band_jitter_hz * rng.uniform(-1.0, 1.0);
        speakers[label].push_back(sp);
      }
    }
    for (std::size_t i = 0; i < total; ++i) {
      const std::size_t label = i % kNumLabels;
      const SpeakerProfile& sp = speakers[label][(i / kNumLabels) % n_spk];
      const std::uint64_t utt_seed = splitmix64(spec.seed * 0x100000001b3ULL + ++utt_counter);
      const Waveform w = synthesize_utterance(spec, label, sp.gain, sp.center_hz, utt_seed);
      char name[64];
      std::snprintf(name, sizeof(name), "%s_%04zu", to_string(split).c_str(), i);
      const std::string rel = std::string("wav/") + name + ".wav";
      write_wav((root / rel).string(), w);
      m.records.push_back({name, rel, label, sp.id, split});
    }
  }
  write_manifest((root / "manifest.csv").string(), m);
  for (auto& r : m.records) r.path = (root / r.path).string();
  return m;
}

double uar(const std::vector<std::size_t>& predictions, const std::vector<std::size_t>& truths) {
  if (predictions.size() != truths.size()) {
    throw std::invalid_argument("uar: predictions and truths differ in length");
  }
  std::map<std::size_t, std::pair<std::size_t, std::size_t>> per_label;  // correct, total
  for (std::size_t i = 0; i < truths.size(); ++i) {
    auto& [correct, total] = per_label[truths[i]];
    ++total;
    if (predictions[i] == truths[i]) ++correct;
  }
  if (per_label.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& [label, ct] : per_label) {
    sum += static_cast<double>(ct.first) / static_cast<double>(ct.second);
  }
  return sum / static_cast<double>(per_label.size());
}

ClassificationReport classification_report(const std::vector<std::size_t>& predictions,
                                            const std::vector<std::size_t>& truths,
                                            std::size_t n_labels) {
  if (predictions.size() != truths.size()) {
    throw std::invalid_argument("classification_report: length mismatch");
  }
  ClassificationReport r;
  r.confusion.assign(n_labels, std::vector<std::size_t>(n_labels, 0));
  for (std::size_t i = 0; i < truths.size(); ++i) {
    if (truths[i] >= n_labels || predictions[i] >= n_labels) {
      throw std::invalid_argument("classification_report: label out of range");
    }
    r.confusion[truths[i]][predictions[i]] += 1;
  }
  r.recalls.assign(n_labels, std::nan(""));
  for (std::size_t l = 0; l < n_labels; ++l) {
    std::size_t total = 0;
    for (std::size_t p = 0; p < n_labels; ++p) total += r.confusion[l][p];
    if (total > 0) r.recalls[l] = static_cast<double>(r.confusion[l][l]) / total;
  }
  r.uar = uar(predictions, truths);
  return r;
}

double spectral_centroid(const Waveform& w) {
  constexpr std::size_t kWin = 400, kHop = 160, kFft = 512;
  const Fft fft(kFft);
  const Window hann = hanning_window(kWin);
  std::vector<double> acc(kFft / 2 + 1, 0.0);
  std::vector<double> frame(kWin);
  const std::size_t n = num_frames(w.samples.size(), kWin, kHop);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < kWin; ++i) frame[i] = w.samples[k * kHop + i] * hann.taps[i];
    const auto p = power_spectrum(fft, frame);
    for (std::size_t b = 0; b < p.size(); ++b) acc[b] += p[b];
  }
  double num = 0.0, den = 0.0;
  const double bin_hz = static_cast<double>(w.sample_rate) / kFft;
  for (std::size_t b = 0; b < acc.size(); ++b) {
    num += bin_hz * static_cast<double>(b) * acc[b];
    den += acc[b];
  }
  return den > 0.0 ? num / den : 0.0;
}

}  // namespace wavefront
