// include/wavefront/model.h

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

#ifndef WAVEFRONT_MODEL_H_
#define WAVEFRONT_MODEL_H_

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "wavefront/dsp.h"
#include "wavefront/melfb.h"
#include "wavefront/net.h"
#include "wavefront/pcen.h"
#include "wavefront/tdfb.h"

namespace wavefront {

enum class FrontendKind { kMel, kMelMvn, kMelPcen, kTdfb, kTdfbPcen };

std::string to_string(FrontendKind kind);
/// Accepts mel, mel_mvn, mel_pcen, tdfb, tdfb_pcen.
FrontendKind parse_frontend(const std::string& name);
bool uses_pcen(FrontendKind kind);
bool uses_tdfb(FrontendKind kind);
const std::vector<FrontendKind>& all_frontends();

struct PipelineConfig {
  FrontendKind frontend = FrontendKind::kMel;
  PcenLearnMask pcen_learn;  // ignored unless the frontend has PCEN
  MelConfig mel;
  TdfbConfig tdfb;  // apply_log is derived from the frontend
  std::size_t hidden = 60;
  std::size_t attention = 50;
  std::size_t n_labels = 2;
  double pcen_r = 0.5;
  double pcen_alpha = 0.98;
  double pcen_delta = 2.0;
  double pcen_s = 0.5;
  double pcen_epsilon = 1e-6;

  std::size_t channels() const { return mel.n_filters; }
  /// Stable key=value serialization; the checkpoint hash is computed over it.
  std::string canonical() const;
  static PipelineConfig from_canonical(const std::string& text);
};

/// Non-owning view of one named tensor.
template <class M>
struct BasicTensorRef {
  std::string name;
  M* tensor = nullptr;
  bool trainable = false;
};
using TensorRef = BasicTensorRef<Matrix>;
using ConstTensorRef = BasicTensorRef<const Matrix>;

/// Gradient (or velocity) buffers laid out like the pipeline's learnable
/// tensors. Unused tensors stay empty.
struct Gradients {
  Matrix conv_taps;
  Matrix pcen_alpha;
  Matrix pcen_delta;
  Matrix pcen_r;
  ModelParams head;

  std::vector<TensorRef> tensors();
  std::vector<ConstTensorRef> tensors() const;
  /// Set by backward when requested.
  std::optional<Matrix> features;
  std::optional<std::vector<double>> waveform;
};

/// What a forward pass consumes: the raw waveform for learnable filterbanks,
/// or the fixed part of the mel frontend computed once per utterance.
struct PreparedInput {
  Waveform waveform;
  FeatureMap fixed;
};

struct PipelineCache {
  TdfbCache tdfb;
  PcenCache pcen;
  FeatureMap features;
  LstmCache lstm;
  AttentionCache attention;
  bool valid = false;
};

struct ForwardResult {
  std::vector<double> logits;
  std::vector<double> attention_weights;
};

class Pipeline {
 public:
  /// Fresh parameters: Gabor taps, constant PCEN init, seeded head weights.
  Pipeline(const PipelineConfig& cfg, std::uint64_t seed);

  const PipelineConfig& config() const { return cfg_; }
  std::uint64_t seed() const { return seed_; }

  TdfbParams& tdfb() { return tdfb_; }
  const TdfbParams& tdfb() const { return tdfb_; }
  PcenParams& pcen() { return pcen_; }
  const PcenParams& pcen() const { return pcen_; }
  ModelParams& head() { return head_; }
  const ModelParams& head() const { return head_; }
  const MelAnalyzer& mel() const { return *mel_; }

  /// All tensors that belong to this frontend, in a fixed order.
  std::vector<TensorRef> tensors();
  std::vector<ConstTensorRef> tensors() const;
  Gradients zero_gradients() const;

  PreparedInput prepare(const Waveform& w) const;
  /// Frontend output (channels x frames) fed to the LSTM.
  FeatureMap features(const PreparedInput& in, PipelineCache* cache = nullptr) const;
  ForwardResult forward(const PreparedInput& in, PipelineCache* cache = nullptr) const;

  /// Frozen tensors come back as exact zeros.
  Gradients backward(const std::vector<double>& grad_logits, const PipelineCache& cache,
                     bool want_input_grad = false) const;

  struct Step {
    double loss = 0.0;
    std::vector<double> logits;
    Gradients grads;
  };
  Step loss_and_gradients(const PreparedInput& in, std::size_t label,
                          bool want_input_grad = false) const;

 private:
  PipelineConfig cfg_;
  std::uint64_t seed_;
  std::shared_ptr<const MelAnalyzer> mel_;
  TdfbParams tdfb_;
  PcenParams pcen_;
  ModelParams head_;
};

/// Classic momentum: v <- mu v + g; theta <- theta - lr v.
class SgdMomentum {
 public:
  SgdMomentum(double learning_rate, double momentum, Gradients zero_velocity);

  void step(Pipeline& model, const Gradients& grads);

  double learning_rate() const { return lr_; }
  double momentum() const { return mu_; }
  Gradients& velocity() { return velocity_; }
  const Gradients& velocity() const { return velocity_; }

 private:
  double lr_;
  double mu_;
  Gradients velocity_;
};

}  // namespace wavefront

#endif  // WAVEFRONT_MODEL_H_
