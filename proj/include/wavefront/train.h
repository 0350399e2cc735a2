// include/wavefront/train.h

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

#ifndef WAVEFRONT_TRAIN_H_
#define WAVEFRONT_TRAIN_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "wavefront/checkpoint.h"
#include "wavefront/data.h"
#include "wavefront/model.h"

namespace wavefront {

/// One training or evaluation run as expressed on the command line.
struct RunConfig {
  FrontendKind frontend = FrontendKind::kMel;
  /// Unset means "learn r, alpha and delta" for PCEN frontends. Setting it for
  /// a frontend without PCEN is a ConfigError.
  std::optional<PcenLearnMask> pcen_learn;
  std::uint64_t seed = 1;
  std::size_t max_epochs = 100;
  std::size_t patience = 10;
  double learning_rate = 0.001;
  double momentum = 0.98;
  double duration_s = 2.5;
  double preemphasis = 0.97;

  /// Throws ConfigError on an invalid combination.
  void validate() const;
  PipelineConfig pipeline() const;
  /// Flags that reproduce this configuration, e.g. "--frontend tdfb_pcen --pcen-learn r".
  std::string flags() const;
  /// Short identifier, e.g. "tdfb_pcen[r]".
  std::string tag() const;
};

/// Every frontend / learn-mask combination the ablations use.
std::vector<RunConfig> ablation_configs();

/// Waveforms of one split, padded or trimmed and pre-emphasized.
struct Dataset {
  std::vector<std::string> ids;
  std::vector<Waveform> waveforms;
  std::vector<std::size_t> labels;

  std::size_t size() const { return labels.size(); }
};

/// Reads the WAVs of `split`; read_wav errors propagate.
Dataset load_split(const Manifest& m, Split split, const RunConfig& cfg);
Waveform condition_waveform(const Waveform& w, const RunConfig& cfg);

/// Worker count for evaluation: WAVEFRONT_THREADS if set (>= 1), otherwise the
/// hardware concurrency.
std::size_t evaluation_threads();

struct Predictions {
  std::vector<std::size_t> labels;
  std::vector<std::vector<double>> logits;
};

/// Forward passes fanned out over `threads` workers; results are stored in
/// input order so the output does not depend on scheduling.
Predictions predict(const Pipeline& model, const std::vector<PreparedInput>& inputs,
                    std::size_t threads);
std::vector<PreparedInput> prepare_all(const Pipeline& model, const Dataset& data);

struct EpochLog {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0.0;
  double valid_uar = 0.0;
};

struct TrainResult {
  std::vector<EpochLog> log;
  std::size_t best_epoch = 0;
  double best_valid_uar = -1.0;
  Checkpoint best;
  double initial_loss = 0.0;  // mean training loss before the first update
};

struct TrainOptions {
  std::size_t threads = 1;
  /// Skips validation; the last epoch is kept. Used for overfitting checks.
  bool no_validation = false;
  /// Also compute the mean training loss before any update.
  bool measure_initial_loss = false;
  std::function<void(const EpochLog&)> on_epoch;
};

/// Batch-size-1 SGD with momentum over a seeded per-epoch shuffle, early
/// stopping on validation UAR, best checkpoint kept.
TrainResult train(const RunConfig& cfg, const Dataset& train_set, const Dataset& valid_set,
                  const TrainOptions& options = {});

/// "epoch,train_loss,valid_uar" CSV with round-trip precision.
std::string format_train_log(const std::vector<EpochLog>& log);

/// Sample mean and standard deviation (n - 1 denominator; 0 for one run).
struct Summary {
  std::size_t n = 0;
  double mean = 0.0;
  double stddev = 0.0;
};
Summary summarize(const std::vector<double>& values);

}  // namespace wavefront

#endif  // WAVEFRONT_TRAIN_H_
