// src/gradcheck.cc

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

#include "wavefront/gradcheck.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

#include "wavefront/matrix.h"
#include "wavefront/model.h"
#include "wavefront/net.h"
#include "wavefront/pcen.h"
#include "wavefront/rng.h"
#include "wavefront/tdfb.h"

namespace wavefront {
namespace {

constexpr double kFrontendThreshold = 1e-5;
constexpr double kChainThreshold = 1e-4;
constexpr double kZeroFloor = 1e-8;

// One tensor under test: `value` is perturbed in place and `loss` re-evaluated.
struct Probe {
  std::string name;
  double* value = nullptr;
  std::size_t size = 0;
  std::vector<double> analytic;
  // The exact gradient is identically zero (e.g. a bias shared by every
  // softmax score). Relative error is undefined there, so both sides are
  // compared against the relative-error floor instead.
  bool structural_zero = false;
};

using LossFn = std::function<double()>;

void check_probes(const std::string& op, std::vector<Probe>& probes, const LossFn& loss,
                  double threshold, const GradcheckOptions& opt,
                  std::vector<GradcheckRow>& rows) {
  for (Probe& probe : probes) {
    if (probe.analytic.size() != probe.size) {
      throw std::logic_error("gradcheck: analytic size mismatch for " + probe.name);
    }
    if (!probe.analytic.empty()) probe.analytic[0] += opt.perturb_analytic;
    GradcheckRow row{op, probe.name, probe.size, 0.0, threshold, false};
    if (probe.structural_zero) {
      row.tensor += " (zero)";
      row.threshold = kZeroFloor;
    }
    for (std::size_t i = 0; i < probe.size; ++i) {
      const double saved = probe.value[i];
      probe.value[i] = saved + opt.step;
      const double up = loss();
      probe.value[i] = saved - opt.step;
      const double down = loss();
      probe.value[i] = saved;
      const double numeric = (up - down) / (2.0 * opt.step);
      const double err =
          probe.structural_zero ? std::max(std::abs(probe.analytic[i]), std::abs(numeric))
                                : relative_error(probe.analytic[i], numeric);
      row.max_rel_error = std::max(row.max_rel_error, err);
    }
    row.passed = row.max_rel_error < row.threshold;
    rows.push_back(row);
  }
}

Matrix random_matrix(std::size_t rows, std::size_t cols, double scale, Rng& rng) {
  Matrix m(rows, cols);
  for (double& v : m.values()) v = scale * rng.normal();
  return m;
}

std::vector<double> to_vector(const Matrix& m) { return {m.values().begin(), m.values().end()}; }

double dot(const Matrix& a, const Matrix& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void check_tdfb(const std::string& op, bool apply_log, const GradcheckOptions& opt,
                std::vector<GradcheckRow>& rows) {
  Rng rng(opt.seed);
  constexpr std::size_t kSamples = 64, kFilters = 2, kWidth = 9;
  TdfbParams p = make_tdfb_params(random_matrix(2 * kFilters, kWidth, 0.5, rng), 8, 4, apply_log);
  Waveform w;
  for (std::size_t i = 0; i < kSamples; ++i) w.samples.push_back(rng.normal());
  TdfbCache cache;
  const FeatureMap out = tdfb_forward(w, p, &cache);
  const Matrix proj = random_matrix(out.channels(), out.frames(), 1.0, rng);
  const TdfbGradients g = tdfb_backward(proj, p, cache, true);

  std::vector<Probe> probes = {
      {"conv_taps", p.conv_taps.data(), p.conv_taps.size(), to_vector(g.conv_taps)},
      {"waveform", w.samples.data(), w.samples.size(), *g.waveform},
  };
  const LossFn loss = [&] { return dot(tdfb_forward(w, p).values, proj); };
  check_probes(op, probes, loss, kFrontendThreshold, opt, rows);
}

void check_pcen(const std::string& op, const PcenLearnMask& mask, const GradcheckOptions& opt,
                std::vector<GradcheckRow>& rows) {
  Rng rng(opt.seed);
  constexpr std::size_t kChannels = 3, kFrames = 10;
  PcenParams p = init_pcen_params(kChannels, 0.5, 0.98, 2.0, mask);
  for (std::size_t c = 0; c < kChannels; ++c) {
    p.r(0, c) = rng.uniform(0.3, 0.9);
    p.alpha(0, c) = rng.uniform(0.6, 0.99);
    p.delta(0, c) = rng.uniform(0.5, 2.5);
  }
  FeatureMap energy{Matrix(kChannels, kFrames), FeatureRole::kPreCompressionEnergy};
  for (double& v : energy.values.values()) v = rng.uniform(0.1, 3.0);
  PcenCache cache;
  const FeatureMap out = pcen_forward(energy, p, &cache);
  const Matrix proj = random_matrix(kChannels, kFrames, 1.0, rng);
  const PcenGradients g = pcen_backward(proj, p, cache);

  std::vector<Probe> probes = {
      {"energy", energy.values.data(), energy.values.size(), to_vector(g.energy)}};
  if (mask.r) probes.push_back({"r", p.r.data(), p.r.size(), to_vector(g.r)});
  if (mask.alpha) probes.push_back({"alpha", p.alpha.data(), p.alpha.size(), to_vector(g.alpha)});
  if (mask.delta) probes.push_back({"delta", p.delta.data(), p.delta.size(), to_vector(g.delta)});
  const LossFn loss = [&] { return dot(pcen_forward(energy, p).values, proj); };
  check_probes(op, probes, loss, kFrontendThreshold, opt, rows);
}

void check_lstm_attention(const std::string& op, const GradcheckOptions& opt,
                          std::vector<GradcheckRow>& rows) {
  Rng rng(opt.seed);
  const HeadConfig cfg{3, 4, 3, 2};
  ModelParams p = init_model_params(cfg, rng);
  for_each_head_tensor(p, [&](const char*, Matrix& m) {
    for (double& v : m.values()) v += 0.1 * rng.normal();
  });
  Matrix x = random_matrix(5, cfg.input_dim, 1.0, rng);
  constexpr std::size_t kLabel = 1;

  LstmCache lc;
  AttentionCache ac;
  const Matrix h = lstm_forward(x, p, &lc);
  const AttentionOutput att = attention_forward(h, p, &ac);
  const LossResult lr = cross_entropy_loss(att.logits, kLabel);
  ModelParams g = zero_model_params(cfg);
  const Matrix grad_h = attention_backward(lr.grad_logits, p, ac, g);
  const Matrix grad_x = lstm_backward(grad_h, p, lc, g);

  std::vector<Probe> probes;
  std::vector<Matrix*> grads;
  for_each_head_tensor(g, [&](const char*, Matrix& m) { grads.push_back(&m); });
  std::size_t k = 0;
  for_each_head_tensor(p, [&](const char* name, Matrix& m) {
    probes.push_back({name, m.data(), m.size(), to_vector(*grads[k++]),
                      std::string(name) == "attn.b2"});
  });
  probes.push_back({"input", x.data(), x.size(), to_vector(grad_x)});
  const LossFn loss = [&] {
    return cross_entropy_loss(attention_forward(lstm_forward(x, p), p).logits, kLabel).loss;
  };
  check_probes(op, probes, loss, kChainThreshold, opt, rows);
}

PipelineConfig micro_config(FrontendKind kind, const PcenLearnMask& mask) {
  PipelineConfig cfg;
  cfg.frontend = kind;
  cfg.pcen_learn = mask;
  cfg.mel.n_filters = 2;
  cfg.mel.win_len = 16;
  cfg.mel.hop = 8;
  cfg.mel.n_fft = 16;
  cfg.tdfb.n_filters = 2;
  cfg.tdfb.width = 9;
  cfg.tdfb.lowpass_width = 16;
  cfg.tdfb.stride = 8;
  cfg.hidden = 4;
  cfg.attention = 3;
  cfg.n_labels = 2;
  return cfg;
}

void check_end_to_end(const std::string& op, FrontendKind kind, const PcenLearnMask& mask,
                      const GradcheckOptions& opt, std::vector<GradcheckRow>& rows) {
  Rng rng(opt.seed);
  Pipeline model(micro_config(kind, mask), opt.seed);
  // Move away from the symmetric constant init so every entry carries signal.
  for (auto& ref : model.tensors()) {
    for (double& v : ref.tensor->values()) v *= 1.0 + 0.1 * rng.normal();
  }
  Waveform w;
  for (int i = 0; i < 64; ++i) w.samples.push_back(0.5 * rng.normal());
  PreparedInput in = model.prepare(w);
  constexpr std::size_t kLabel = 1;
  const Pipeline::Step step = model.loss_and_gradients(in, kLabel, true);

  std::vector<Probe> probes;
  auto grads = step.grads.tensors();
  auto params = model.tensors();
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (!params[i].trainable) continue;
    probes.push_back({params[i].name, params[i].tensor->data(), params[i].tensor->size(),
                      to_vector(*grads[i].tensor), params[i].name == "attn.b2"});
  }
  if (uses_tdfb(kind)) {
    probes.push_back({"waveform", in.waveform.samples.data(), in.waveform.samples.size(),
                      *step.grads.waveform});
  } else {
    probes.push_back({"features", in.fixed.values.data(), in.fixed.values.size(),
                      to_vector(*step.grads.features)});
  }
  const LossFn loss = [&] { return cross_entropy_loss(model.forward(in).logits, kLabel).loss; };
  check_probes(op, probes, loss, kChainThreshold, opt, rows);
}

struct Entry {
  std::string name;
  std::function<void(const std::string&, const GradcheckOptions&, std::vector<GradcheckRow>&)> run;
};

const std::vector<Entry>& registry() {
  static const std::vector<Entry> entries = [] {
    std::vector<Entry> e;
    e.push_back({"tdfb.log", [](auto& n, auto& o, auto& r) { check_tdfb(n, true, o, r); }});
    e.push_back({"tdfb.linear", [](auto& n, auto& o, auto& r) { check_tdfb(n, false, o, r); }});
    const std::vector<std::pair<std::string, PcenLearnMask>> masks = {
        {"r,alpha,delta", {true, true, true}},
        {"r", {true, false, false}},
        {"alpha", {false, true, false}},
    };
    for (const auto& [tag, mask] : masks) {
      e.push_back({"pcen." + tag,
                   [mask](auto& n, auto& o, auto& r) { check_pcen(n, mask, o, r); }});
    }
    e.push_back({"lstm_attention", [](auto& n, auto& o, auto& r) { check_lstm_attention(n, o, r); }});
    for (FrontendKind kind : all_frontends()) {
      if (!uses_pcen(kind)) {
        e.push_back({"end_to_end." + to_string(kind), [kind](auto& n, auto& o, auto& r) {
                       check_end_to_end(n, kind, PcenLearnMask{false, false, false}, o, r);
                     }});
        continue;
      }
      for (const auto& [tag, mask] : masks) {
        e.push_back({"end_to_end." + to_string(kind) + "." + tag,
                     [kind, mask](auto& n, auto& o, auto& r) {
                       check_end_to_end(n, kind, mask, o, r);
                     }});
      }
    }
    return e;
  }();
  return entries;
}

bool selected(const std::string& name, const std::string& selector) {
  if (selector == "all" || selector == name) return true;
  return name.size() > selector.size() && name.compare(0, selector.size(), selector) == 0 &&
         name[selector.size()] == '.';
}

}  // namespace

double relative_error(double analytic, double numeric) {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-8});
  return std::abs(analytic - numeric) / denom;
}

std::vector<std::string> gradcheck_ops() {
  std::vector<std::string> names;
  for (const auto& e : registry()) names.push_back(e.name);
  return names;
}

std::vector<GradcheckRow> run_gradcheck(const std::string& selector,
                                        const GradcheckOptions& options) {
  std::vector<GradcheckRow> rows;
  bool any = false;
  for (const auto& e : registry()) {
    if (!selected(e.name, selector)) continue;
    any = true;
    e.run(e.name, options, rows);
  }
  if (!any) throw std::invalid_argument("gradcheck: unknown op '" + selector + "'");
  return rows;
}

}  // namespace wavefront
