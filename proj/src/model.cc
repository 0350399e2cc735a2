// src/model.cc

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

#include "wavefront/model.h"

#include <cstdio>
#include <map>
#include <sstream>
#include <stdexcept>

#include "wavefront/error.h"

namespace wavefront {
namespace {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

HeadConfig head_config(const PipelineConfig& cfg) {
  return {cfg.channels(), cfg.hidden, cfg.attention, cfg.n_labels};
}

template <class Target, class Source, class Ref>
std::vector<Ref> collect(Source& src, FrontendKind kind, const PcenLearnMask& mask) {
  std::vector<Ref> refs;
  if (uses_tdfb(kind)) refs.push_back({"tdfb.conv_taps", &src.conv_taps, true});
  if (uses_pcen(kind)) {
    refs.push_back({"pcen.alpha", &src.pcen_alpha, mask.alpha});
    refs.push_back({"pcen.delta", &src.pcen_delta, mask.delta});
    refs.push_back({"pcen.r", &src.pcen_r, mask.r});
  }
  for_each_head_tensor(src.head, [&](const char* name, Target& m) {
    refs.push_back({name, &m, true});
  });
  return refs;
}

template <class Target, class Ref, class G>
std::vector<Ref> gradient_refs(G& g) {
  std::vector<Ref> refs;
  if (!g.conv_taps.empty()) refs.push_back({"tdfb.conv_taps", &g.conv_taps, true});
  if (!g.pcen_alpha.empty()) {
    refs.push_back({"pcen.alpha", &g.pcen_alpha, true});
    refs.push_back({"pcen.delta", &g.pcen_delta, true});
    refs.push_back({"pcen.r", &g.pcen_r, true});
  }
  for_each_head_tensor(g.head, [&](const char* name, Target& m) {
    refs.push_back({name, &m, true});
  });
  return refs;
}

}  // namespace

std::string to_string(FrontendKind kind) {
  switch (kind) {
    case FrontendKind::kMel: return "mel";
    case FrontendKind::kMelMvn: return "mel_mvn";
    case FrontendKind::kMelPcen: return "mel_pcen";
    case FrontendKind::kTdfb: return "tdfb";
    case FrontendKind::kTdfbPcen: return "tdfb_pcen";
  }
  return "unknown";
}

FrontendKind parse_frontend(const std::string& name) {
  for (FrontendKind k : all_frontends()) {
    if (to_string(k) == name) return k;
  }
  throw ConfigError("unknown frontend '" + name +
                    "' (expected mel, mel_mvn, mel_pcen, tdfb, tdfb_pcen)");
}

bool uses_pcen(FrontendKind kind) {
  return kind == FrontendKind::kMelPcen || kind == FrontendKind::kTdfbPcen;
}

bool uses_tdfb(FrontendKind kind) {
  return kind == FrontendKind::kTdfb || kind == FrontendKind::kTdfbPcen;
}

const std::vector<FrontendKind>& all_frontends() {
  static const std::vector<FrontendKind> kinds = {FrontendKind::kMel, FrontendKind::kMelMvn,
                                                  FrontendKind::kMelPcen, FrontendKind::kTdfb,
                                                  FrontendKind::kTdfbPcen};
  return kinds;
}

std::string PipelineConfig::canonical() const {
  std::ostringstream os;
  os << "frontend=" << to_string(frontend)
     << ";pcen_learn=" << (uses_pcen(frontend) ? pcen_learn.to_string() : "none")
     << ";n_filters=" << mel.n_filters << ";win_len=" << mel.win_len << ";hop=" << mel.hop
     << ";n_fft=" << mel.n_fft << ";sample_rate=" << mel.sample_rate
     << ";f_min=" << format_double(mel.f_min) << ";f_max=" << format_double(mel.f_max)
     << ";tdfb_width=" << tdfb.width << ";lowpass_width=" << tdfb.lowpass_width
     << ";stride=" << tdfb.stride << ";hidden=" << hidden << ";attention=" << attention
     << ";n_labels=" << n_labels << ";pcen_r=" << format_double(pcen_r)
     << ";pcen_alpha=" << format_double(pcen_alpha)
     << ";pcen_delta=" << format_double(pcen_delta) << ";pcen_s=" << format_double(pcen_s)
     << ";pcen_epsilon=" << format_double(pcen_epsilon);
  return os.str();
}

PipelineConfig PipelineConfig::from_canonical(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ';')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw FormatError("config", "malformed config entry '" + item + "'");
    kv[item.substr(0, eq)] = item.substr(eq + 1);
  }
  auto get = [&](const char* key) -> const std::string& {
    auto it = kv.find(key);
    if (it == kv.end()) throw FormatError("config", std::string("config lacks '") + key + "'");
    return it->second;
  };
  auto size = [&](const char* key) { return static_cast<std::size_t>(std::stoull(get(key))); };
  auto real = [&](const char* key) { return std::stod(get(key)); };

  PipelineConfig cfg;
  cfg.frontend = parse_frontend(get("frontend"));
  cfg.pcen_learn = PcenLearnMask::parse(get("pcen_learn"));
  cfg.mel.n_filters = size("n_filters");
  cfg.mel.win_len = size("win_len");
  cfg.mel.hop = size("hop");
  cfg.mel.n_fft = size("n_fft");
  cfg.mel.sample_rate = static_cast<int>(size("sample_rate"));
  cfg.mel.f_min = real("f_min");
  cfg.mel.f_max = real("f_max");
  cfg.tdfb.n_filters = cfg.mel.n_filters;
  cfg.tdfb.sample_rate = cfg.mel.sample_rate;
  cfg.tdfb.width = size("tdfb_width");
  cfg.tdfb.lowpass_width = size("lowpass_width");
  cfg.tdfb.stride = size("stride");
  cfg.hidden = size("hidden");
  cfg.attention = size("attention");
  cfg.n_labels = size("n_labels");
  cfg.pcen_r = real("pcen_r");
  cfg.pcen_alpha = real("pcen_alpha");
  cfg.pcen_delta = real("pcen_delta");
  cfg.pcen_s = real("pcen_s");
  cfg.pcen_epsilon = real("pcen_epsilon");
  return cfg;
}

std::vector<TensorRef> Gradients::tensors() { return gradient_refs<Matrix, TensorRef>(*this); }

std::vector<ConstTensorRef> Gradients::tensors() const {
  return gradient_refs<const Matrix, ConstTensorRef>(*this);
}

Pipeline::Pipeline(const PipelineConfig& cfg, std::uint64_t seed)
    : cfg_(cfg), seed_(seed), mel_(std::make_shared<MelAnalyzer>(cfg.mel)) {
  if (!uses_pcen(cfg_.frontend)) cfg_.pcen_learn = PcenLearnMask{false, false, false};
  if (uses_tdfb(cfg_.frontend)) {
    TdfbConfig td = cfg_.tdfb;
    td.n_filters = cfg_.mel.n_filters;
    td.sample_rate = cfg_.mel.sample_rate;
    td.apply_log = cfg_.frontend == FrontendKind::kTdfb;
    tdfb_ = init_tdfb_params(td, cfg_.mel);
  }
  if (uses_pcen(cfg_.frontend)) {
    pcen_ = init_pcen_params(cfg_.channels(), cfg_.pcen_r, cfg_.pcen_alpha, cfg_.pcen_delta,
                             cfg_.pcen_learn);
    pcen_.s = cfg_.pcen_s;
    pcen_.epsilon = cfg_.pcen_epsilon;
  }
  Rng rng(seed);
  head_ = init_model_params(head_config(cfg_), rng);
}

std::vector<TensorRef> Pipeline::tensors() {
  struct View {
    Matrix& conv_taps;
    Matrix& pcen_alpha;
    Matrix& pcen_delta;
    Matrix& pcen_r;
    ModelParams& head;
  } v{tdfb_.conv_taps, pcen_.alpha, pcen_.delta, pcen_.r, head_};
  return collect<Matrix, View, TensorRef>(v, cfg_.frontend, cfg_.pcen_learn);
}

std::vector<ConstTensorRef> Pipeline::tensors() const {
  struct View {
    const Matrix& conv_taps;
    const Matrix& pcen_alpha;
    const Matrix& pcen_delta;
    const Matrix& pcen_r;
    const ModelParams& head;
  } v{tdfb_.conv_taps, pcen_.alpha, pcen_.delta, pcen_.r, head_};
  return collect<const Matrix, View, ConstTensorRef>(v, cfg_.frontend, cfg_.pcen_learn);
}

Gradients Pipeline::zero_gradients() const {
  Gradients g;
  if (uses_tdfb(cfg_.frontend)) g.conv_taps = Matrix(tdfb_.conv_taps.rows(), tdfb_.conv_taps.cols());
  if (uses_pcen(cfg_.frontend)) {
    g.pcen_alpha = Matrix(1, cfg_.channels());
    g.pcen_delta = Matrix(1, cfg_.channels());
    g.pcen_r = Matrix(1, cfg_.channels());
  }
  g.head = zero_model_params(head_config(cfg_));
  return g;
}

PreparedInput Pipeline::prepare(const Waveform& w) const {
  PreparedInput in;
  switch (cfg_.frontend) {
    case FrontendKind::kMel:
      in.fixed = mel_->log_features(w);
      break;
    case FrontendKind::kMelMvn:
      in.fixed = mean_variance_normalize(mel_->log_features(w));
      break;
    case FrontendKind::kMelPcen:
      in.fixed = mel_->energies(w);
      break;
    case FrontendKind::kTdfb:
    case FrontendKind::kTdfbPcen:
      in.waveform = w;
      break;
  }
  return in;
}

FeatureMap Pipeline::features(const PreparedInput& in, PipelineCache* cache) const {
  TdfbCache* td_cache = cache != nullptr ? &cache->tdfb : nullptr;
  PcenCache* pc_cache = cache != nullptr ? &cache->pcen : nullptr;
  switch (cfg_.frontend) {
    case FrontendKind::kMel:
    case FrontendKind::kMelMvn:
      return in.fixed;
    case FrontendKind::kMelPcen:
      return pcen_forward(in.fixed, pcen_, pc_cache);
    case FrontendKind::kTdfb:
      return tdfb_forward(in.waveform, tdfb_, td_cache);
    case FrontendKind::kTdfbPcen:
      return pcen_forward(tdfb_forward(in.waveform, tdfb_, td_cache), pcen_, pc_cache);
  }
  throw std::logic_error("unhandled frontend");
}

ForwardResult Pipeline::forward(const PreparedInput& in, PipelineCache* cache) const {
  FeatureMap feats = features(in, cache);
  if (feats.channels() != cfg_.channels()) {
    throw std::invalid_argument("Pipeline::forward: prepared input has wrong channel count");
  }
  const Matrix x = feats.values.transposed();
  const Matrix h = lstm_forward(x, head_, cache != nullptr ? &cache->lstm : nullptr);
  AttentionOutput att = attention_forward(h, head_, cache != nullptr ? &cache->attention : nullptr);
  if (cache != nullptr) {
    cache->features = std::move(feats);
    cache->valid = true;
  }
  return {std::move(att.logits), std::move(att.weights)};
}

Gradients Pipeline::backward(const std::vector<double>& grad_logits, const PipelineCache& cache,
                             bool want_input_grad) const {
  if (!cache.valid) throw std::invalid_argument("Pipeline::backward: no forward cache");
  Gradients g = zero_gradients();
  const Matrix grad_h = attention_backward(grad_logits, head_, cache.attention, g.head);
  const Matrix grad_x = lstm_backward(grad_h, head_, cache.lstm, g.head);
  Matrix grad_feat = grad_x.transposed();

  if (uses_pcen(cfg_.frontend)) {
    PcenGradients pg = pcen_backward(grad_feat, pcen_, cache.pcen);
    g.pcen_alpha = std::move(pg.alpha);
    g.pcen_delta = std::move(pg.delta);
    g.pcen_r = std::move(pg.r);
    grad_feat = std::move(pg.energy);
  }
  if (uses_tdfb(cfg_.frontend)) {
    TdfbGradients tg = tdfb_backward(grad_feat, tdfb_, cache.tdfb, want_input_grad);
    g.conv_taps = std::move(tg.conv_taps);
    if (tg.waveform) g.waveform = std::move(tg.waveform);
  }
  if (want_input_grad) g.features = std::move(grad_feat);
  return g;
}

Pipeline::Step Pipeline::loss_and_gradients(const PreparedInput& in, std::size_t label,
                                            bool want_input_grad) const {
  PipelineCache cache;
  ForwardResult fwd = forward(in, &cache);
  LossResult loss = cross_entropy_loss(fwd.logits, label);
  Step step;
  step.loss = loss.loss;
  step.logits = std::move(fwd.logits);
  step.grads = backward(loss.grad_logits, cache, want_input_grad);
  return step;
}

SgdMomentum::SgdMomentum(double learning_rate, double momentum, Gradients zero_velocity)
    : lr_(learning_rate), mu_(momentum), velocity_(std::move(zero_velocity)) {
  if (!(learning_rate > 0.0)) throw std::invalid_argument("SgdMomentum: learning rate must be > 0");
  if (!(momentum >= 0.0 && momentum < 1.0)) {
    throw std::invalid_argument("SgdMomentum: momentum must be in [0, 1)");
  }
}

void SgdMomentum::step(Pipeline& model, const Gradients& grads) {
  auto params = model.tensors();
  auto vel = velocity_.tensors();
  const auto g = grads.tensors();
  if (params.size() != vel.size() || params.size() != g.size()) {
    throw std::invalid_argument("SgdMomentum::step: tensor sets differ");
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (params[i].name != g[i].name || params[i].name != vel[i].name) {
      throw std::invalid_argument("SgdMomentum::step: tensor order mismatch at " + params[i].name);
    }
    Matrix& theta = *params[i].tensor;
    Matrix& v = *vel[i].tensor;
    const Matrix& grad = *g[i].tensor;
    if (!theta.same_shape(grad) || !theta.same_shape(v)) {
      throw std::invalid_argument("SgdMomentum::step: shape mismatch for " + params[i].name);
    }
    if (!params[i].trainable) continue;
    for (std::size_t k = 0; k < theta.size(); ++k) {
      v[k] = mu_ * v[k] + grad[k];
      theta[k] -= lr_ * v[k];
    }
  }
}

}  // namespace wavefront
