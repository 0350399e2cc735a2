// src/train.cc

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

#include "wavefront/train.h"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numeric>
#include <string>
#include <thread>

#include "wavefront/error.h"
#include "wavefront/rng.h"

namespace wavefront {
namespace {

// Separate RNG stream for epoch order so it never aliases the init stream.
constexpr std::uint64_t kShuffleStream = 0x5eedf00dcafe1234ULL;

std::size_t argmax(const std::vector<double>& v) {
  return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

}  // namespace

void RunConfig::validate() const {
  if (pcen_learn && !uses_pcen(frontend)) {
    throw ConfigError("--pcen-learn is only valid with a PCEN frontend (mel_pcen, tdfb_pcen), not " +
                      to_string(frontend));
  }
  if (max_epochs == 0) throw ConfigError("epochs must be >= 1");
  if (patience == 0) throw ConfigError("patience must be >= 1");
  if (!(learning_rate > 0.0)) throw ConfigError("learning rate must be > 0");
  if (!(momentum >= 0.0 && momentum < 1.0)) throw ConfigError("momentum must be in [0, 1)");
  if (!(duration_s > 0.0)) throw ConfigError("duration must be > 0");
  if (!(preemphasis >= 0.0 && preemphasis < 1.0)) {
    throw ConfigError("pre-emphasis must be in [0, 1)");
  }
}

PipelineConfig RunConfig::pipeline() const {
  validate();
  PipelineConfig p;
  p.frontend = frontend;
  p.pcen_learn = uses_pcen(frontend) ? pcen_learn.value_or(PcenLearnMask{})
                                     : PcenLearnMask{false, false, false};
  return p;
}

std::string RunConfig::flags() const {
  std::string s = "--frontend " + to_string(frontend);
  if (uses_pcen(frontend)) s += " --pcen-learn " + pcen_learn.value_or(PcenLearnMask{}).to_string();
  return s;
}

std::string RunConfig::tag() const {
  std::string s = to_string(frontend);
  if (uses_pcen(frontend)) s += "[" + pcen_learn.value_or(PcenLearnMask{}).to_string() + "]";
  return s;
}

std::vector<RunConfig> ablation_configs() {
  std::vector<RunConfig> out;
  for (FrontendKind kind : all_frontends()) {
    RunConfig c;
    c.frontend = kind;
    if (!uses_pcen(kind)) {
      out.push_back(c);
      continue;
    }
    for (const char* mask : {"r,alpha,delta", "r", "alpha"}) {
      c.pcen_learn = PcenLearnMask::parse(mask);
      out.push_back(c);
    }
  }
  return out;
}

Waveform condition_waveform(const Waveform& w, const RunConfig& cfg) {
  return preemphasis(pad_or_trim(w, cfg.duration_s), cfg.preemphasis);
}

Dataset load_split(const Manifest& m, Split split, const RunConfig& cfg) {
  Dataset d;
  for (const auto& u : m.records) {
    if (u.split != split) continue;
    d.ids.push_back(u.id);
    d.waveforms.push_back(condition_waveform(read_wav(u.path), cfg));
    d.labels.push_back(u.label);
  }
  return d;
}

std::size_t evaluation_threads() {
  if (const char* env = std::getenv("WAVEFRONT_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1) return static_cast<std::size_t>(v);
    throw ConfigError("WAVEFRONT_THREADS must be a positive integer, got '" + std::string(env) +
                      "'");
  }
  return std::max(1U, std::thread::hardware_concurrency());
}

std::vector<PreparedInput> prepare_all(const Pipeline& model, const Dataset& data) {
  std::vector<PreparedInput> out;
  out.reserve(data.size());
  for (const auto& w : data.waveforms) out.push_back(model.prepare(w));
  return out;
}

Predictions predict(const Pipeline& model, const std::vector<PreparedInput>& inputs,
                    std::size_t threads) {
  Predictions p;
  p.labels.resize(inputs.size());
  p.logits.resize(inputs.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  auto worker = [&] {
    for (std::size_t i = next++; i < inputs.size() && !failed; i = next++) {
      try {
        p.logits[i] = model.forward(inputs[i]).logits;
        p.labels[i] = argmax(p.logits[i]);
      } catch (...) {
        if (!failed.exchange(true)) error = std::current_exception();
      }
    }
  };
  const std::size_t n = std::min(std::max<std::size_t>(threads, 1), inputs.size());
  if (n <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < n; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);
  return p;
}

TrainResult train(const RunConfig& cfg, const Dataset& train_set, const Dataset& valid_set,
                  const TrainOptions& options) {
  const PipelineConfig pcfg = cfg.pipeline();
  if (train_set.size() == 0) throw DataError("training split is empty");
  if (!options.no_validation && valid_set.size() == 0) throw DataError("validation split is empty");

  Pipeline model(pcfg, cfg.seed);
  SgdMomentum opt(cfg.learning_rate, cfg.momentum, model.zero_gradients());
  const std::vector<PreparedInput> train_in = prepare_all(model, train_set);
  const std::vector<PreparedInput> valid_in =
      options.no_validation ? std::vector<PreparedInput>{} : prepare_all(model, valid_set);

  TrainResult result;
  if (options.measure_initial_loss) {
    const Predictions init = predict(model, train_in, options.threads);
    double sum = 0.0;
    for (std::size_t i = 0; i < train_in.size(); ++i) {
      sum += cross_entropy_loss(init.logits[i], train_set.labels[i]).loss;
    }
    result.initial_loss = sum / static_cast<double>(train_in.size());
  }

  Rng order_rng(cfg.seed ^ kShuffleStream);
  std::vector<std::size_t> order(train_in.size());
  std::size_t since_best = 0;
  for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    std::iota(order.begin(), order.end(), 0);
    order_rng.shuffle(order);
    double loss_sum = 0.0;
    for (std::size_t idx : order) {
      const Pipeline::Step step = model.loss_and_gradients(train_in[idx], train_set.labels[idx]);
      if (!std::isfinite(step.loss)) {
        throw NumericError("non-finite training loss at epoch " + std::to_string(epoch) +
                           " on utterance '" + train_set.ids[idx] + "'");
      }
      loss_sum += step.loss;
      opt.step(model, step.grads);
    }
    EpochLog row{epoch, loss_sum / static_cast<double>(order.size()), 0.0};
    if (options.no_validation) {
      result.best = make_checkpoint(model, opt, epoch);
      result.best_epoch = epoch;
    } else {
      row.valid_uar = uar(predict(model, valid_in, options.threads).labels, valid_set.labels);
      if (row.valid_uar > result.best_valid_uar) {
        result.best_valid_uar = row.valid_uar;
        result.best_epoch = epoch;
        result.best = make_checkpoint(model, opt, epoch);
        since_best = 0;
      } else {
        ++since_best;
      }
    }
    result.log.push_back(row);
    if (options.on_epoch) options.on_epoch(row);
    if (!options.no_validation && since_best >= cfg.patience) break;
  }
  return result;
}

std::string format_train_log(const std::vector<EpochLog>& log) {
  std::string out = "epoch,train_loss,valid_uar\n";
  char buf[96];
  for (const auto& row : log) {
    std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g\n", row.epoch, row.train_loss, row.valid_uar);
    out += buf;
  }
  return out;
}

Summary summarize(const std::vector<double>& values) {
  Summary s;
  s.n = values.size();
  if (s.n == 0) return s;
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(s.n);
  if (s.n > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(ss / static_cast<double>(s.n - 1));
  }
  return s;
}

}  // namespace wavefront
