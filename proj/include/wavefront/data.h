// include/wavefront/data.h

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

#ifndef WAVEFRONT_DATA_H_
#define WAVEFRONT_DATA_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "wavefront/dsp.h"

namespace wavefront {

// ---------------------------------------------------------------------------
// WAV (RIFF, PCM 16-bit, mono, 16 kHz)

/// Samples are scaled by 1/32768. Wrong rate, channel count or codec raise
/// FormatError naming the field; truncated chunks raise IoError.
Waveform read_wav(const std::string& path);
Waveform parse_wav(const std::string& bytes);

/// Clips to [-1, 1) and rounds to the nearest PCM16 step.
void write_wav(const std::string& path, const Waveform& w);
std::string encode_wav(const Waveform& w);

/// Zero-pads or truncates the tail to round(duration_s * sample_rate) samples.
Waveform pad_or_trim(const Waveform& w, double duration_s = 2.5);

// ---------------------------------------------------------------------------
// Manifest

enum class Split { kTrain, kValid, kTest };
inline constexpr std::array<Split, 3> kAllSplits = {Split::kTrain, Split::kValid, Split::kTest};

std::string to_string(Split s);
Split parse_split(const std::string& s);

/// Label 0 is control, label 1 dysarthric.
inline constexpr std::size_t kNumLabels = 2;
std::string label_name(std::size_t label);
std::size_t parse_label(const std::string& name);

struct Utterance {
  std::string id;
  std::string path;
  std::size_t label = 0;
  std::string speaker;
  Split split = Split::kTrain;
};

struct Manifest {
  std::vector<Utterance> records;

  std::vector<Utterance> split(Split s) const;
};

/// CSV with header `id,path,label,speaker,split`. Relative paths are resolved
/// against the manifest's directory.
Manifest read_manifest(const std::string& path);
void write_manifest(const std::string& path, const Manifest& m);

struct ManifestReport {
  /// counts[split][label]
  std::map<Split, std::array<std::size_t, kNumLabels>> counts;
};

/// Speaker-disjoint splits, every label present in every split, and (if
/// `check_files`) every path readable. Throws ValidationError listing the
/// offending speakers, splits or files.
ManifestReport validate_manifest(const Manifest& m, bool check_files = true);

// ---------------------------------------------------------------------------
// Synthetic two-class corpus

struct SyntheticSpec {
  std::uint64_t seed = 1;
  std::size_t n_train = 200;
  std::size_t n_valid = 50;
  std::size_t n_test = 80;
  std::array<double, kNumLabels> band_centers_hz = {2000.0, 6500.0};
  double band_width_hz = 500.0;
  double noise_floor = 0.01;       // std of the white background
  std::size_t speakers_per_class_train = 5;
  std::size_t speakers_per_class_eval = 2;  // valid and test each
  double band_jitter_hz = 150.0;   // per-speaker shift of the band center
  double min_gain = 0.1;           // per-speaker gain, log-uniform
  double max_gain = 0.6;
  int sample_rate = 16000;
};

/// Writes `<out_dir>/wav/*.wav` and `<out_dir>/manifest.csv`; returns the
/// manifest. Output is byte-identical for equal specs.
Manifest generate_synthetic(const SyntheticSpec& spec, const std::string& out_dir);

/// One synthetic utterance (exposed for tests).
Waveform synthesize_utterance(const SyntheticSpec& spec, std::size_t label, double gain,
                              double center_hz, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Metrics

/// Mean per-label recall over labels present in `truths`.
double uar(const std::vector<std::size_t>& predictions, const std::vector<std::size_t>& truths);

struct ClassificationReport {
  double uar = 0.0;
  std::vector<double> recalls;  // per label; NaN when the label is absent
  std::vector<std::vector<std::size_t>> confusion;  // [truth][prediction]
};

ClassificationReport classification_report(const std::vector<std::size_t>& predictions,
                                            const std::vector<std::size_t>& truths,
                                            std::size_t n_labels = kNumLabels);

/// Spectral centroid (Hz) of the whole waveform's power spectrum.
double spectral_centroid(const Waveform& w);

}  // namespace wavefront

#endif  // WAVEFRONT_DATA_H_
