// tests/test_train.cc

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
#include <cstdlib>
#include <filesystem>
#include <set>

#include "doctest.h"
#include "wavefront/error.h"
#include "wavefront/train.h"

using namespace wavefront;
namespace fs = std::filesystem;

namespace {

const Manifest& small_corpus() {
  static const Manifest m = [] {
    SyntheticSpec spec;
    spec.seed = 5;
    spec.n_train = 16;
    spec.n_valid = 8;
    spec.n_test = 8;
    spec.speakers_per_class_train = 2;
    spec.speakers_per_class_eval = 1;
    const fs::path dir = fs::temp_directory_path() / "wavefront_test_train_corpus";
    fs::remove_all(dir);
    return generate_synthetic(spec, dir.string());
  }();
  return m;
}

RunConfig mel_config(std::size_t epochs, std::size_t patience) {
  RunConfig cfg;
  cfg.frontend = FrontendKind::kMel;
  cfg.seed = 3;
  cfg.max_epochs = epochs;
  cfg.patience = patience;
  return cfg;
}

}  // namespace

TEST_CASE("run config validation") {
  RunConfig cfg;
  cfg.frontend = FrontendKind::kMelMvn;
  cfg.pcen_learn = PcenLearnMask::parse("r");
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.frontend = FrontendKind::kTdfb;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.frontend = FrontendKind::kTdfbPcen;
  CHECK_NOTHROW(cfg.validate());
  CHECK(cfg.tag() == "tdfb_pcen[r]");
  CHECK(cfg.flags() == "--frontend tdfb_pcen --pcen-learn r");
  CHECK_FALSE(cfg.pipeline().pcen_learn.alpha);

  RunConfig plain;
  plain.frontend = FrontendKind::kMelPcen;
  const PcenLearnMask all = plain.pipeline().pcen_learn;
  CHECK((all.r && all.alpha && all.delta));

  for (auto mutate : {+[](RunConfig& c) { c.max_epochs = 0; },
                      +[](RunConfig& c) { c.patience = 0; },
                      +[](RunConfig& c) { c.learning_rate = 0.0; },
                      +[](RunConfig& c) { c.momentum = 1.0; }}) {
    RunConfig bad;
    mutate(bad);
    CHECK_THROWS_AS(bad.validate(), ConfigError);
  }
}

TEST_CASE("every ablation row is expressible") {
  const auto configs = ablation_configs();
  CHECK(configs.size() == 9);
  std::set<std::string> tags;
  for (const auto& c : configs) {
    CHECK_NOTHROW(c.validate());
    tags.insert(c.tag());
  }
  CHECK(tags.size() == 9);
  for (const char* t : {"mel", "mel_mvn", "tdfb", "mel_pcen[r]", "tdfb_pcen[alpha]",
                        "tdfb_pcen[r,alpha,delta]"}) {
    CHECK(tags.count(t) == 1);
  }
}

TEST_CASE("summary statistics") {
  const Summary s = summarize({0.9, 1.0, 0.8});
  CHECK(s.n == 3);
  CHECK(s.mean == doctest::Approx(0.9));
  CHECK(s.stddev == doctest::Approx(0.1));
  CHECK(summarize({0.7}).stddev == 0.0);
}

TEST_CASE("evaluation thread count") {
  ::setenv("WAVEFRONT_THREADS", "3", 1);
  CHECK(evaluation_threads() == 3);
  ::setenv("WAVEFRONT_THREADS", "zero", 1);
  CHECK_THROWS_AS(evaluation_threads(), ConfigError);
  ::setenv("WAVEFRONT_THREADS", "0", 1);
  CHECK_THROWS_AS(evaluation_threads(), ConfigError);
  ::unsetenv("WAVEFRONT_THREADS");
  CHECK(evaluation_threads() >= 1);
}

TEST_CASE("loaded splits are conditioned to 2.5 s") {
  const RunConfig cfg = mel_config(1, 1);
  const Dataset d = load_split(small_corpus(), Split::kValid, cfg);
  CHECK(d.size() == 8);
  for (const auto& w : d.waveforms) CHECK(w.samples.size() == 40000);
}

TEST_CASE("predictions do not depend on the thread count") {
  const RunConfig cfg = mel_config(1, 1);
  const Pipeline model(cfg.pipeline(), cfg.seed);
  const Dataset d = load_split(small_corpus(), Split::kTest, cfg);
  const auto inputs = prepare_all(model, d);
  const Predictions one = predict(model, inputs, 1);
  const Predictions four = predict(model, inputs, 4);
  CHECK(one.logits == four.logits);
  CHECK(one.labels == four.labels);
}

TEST_CASE("early stopping contract and best checkpoint") {
  const RunConfig cfg = mel_config(12, 2);
  const Dataset tr = load_split(small_corpus(), Split::kTrain, cfg);
  const Dataset va = load_split(small_corpus(), Split::kValid, cfg);
  const TrainResult r = train(cfg, tr, va);
  REQUIRE_FALSE(r.log.empty());

  // Gaps between improvements of the best-so-far UAR never exceed patience.
  double best = -1.0;
  std::size_t last_improvement = 0;
  for (const auto& row : r.log) {
    CHECK(row.epoch - last_improvement <= cfg.patience);
    if (row.valid_uar > best) {
      best = row.valid_uar;
      last_improvement = row.epoch;
    }
  }
  CHECK(best == r.best_valid_uar);
  CHECK(last_improvement == r.best_epoch);
  const bool stopped_early = r.log.size() < cfg.max_epochs;
  if (stopped_early) CHECK(r.log.size() == r.best_epoch + cfg.patience);
  CHECK(r.best.epoch == r.best_epoch);

  // Re-evaluating the best checkpoint reproduces the logged UAR exactly.
  const Pipeline restored = restore_pipeline(r.best);
  const Predictions p = predict(restored, prepare_all(restored, va), 2);
  CHECK(uar(p.labels, va.labels) == r.best_valid_uar);
}

TEST_CASE("training is deterministic") {
  const RunConfig cfg = mel_config(3, 10);
  const Dataset tr = load_split(small_corpus(), Split::kTrain, cfg);
  const Dataset va = load_split(small_corpus(), Split::kValid, cfg);
  TrainOptions opt;
  opt.threads = 1;
  const TrainResult a = train(cfg, tr, va, opt);
  opt.threads = 3;
  const TrainResult b = train(cfg, tr, va, opt);
  CHECK(format_train_log(a.log) == format_train_log(b.log));
  CHECK(serialize_checkpoint(a.best) == serialize_checkpoint(b.best));

  RunConfig other = cfg;
  other.seed = 4;
  CHECK(format_train_log(train(other, tr, va).log) != format_train_log(a.log));
}

TEST_CASE("training without validation keeps the last epoch") {
  const RunConfig cfg = mel_config(2, 1);
  const Dataset tr = load_split(small_corpus(), Split::kTrain, cfg);
  TrainOptions opt;
  opt.no_validation = true;
  opt.measure_initial_loss = true;
  std::size_t callbacks = 0;
  opt.on_epoch = [&](const EpochLog&) { ++callbacks; };
  const TrainResult r = train(cfg, tr, Dataset{}, opt);
  CHECK(r.log.size() == 2);
  CHECK(callbacks == 2);
  CHECK(r.best_epoch == 2);
  CHECK(r.initial_loss > 0.0);
  CHECK_THROWS_AS(train(cfg, tr, Dataset{}), DataError);
  CHECK_THROWS_AS(train(cfg, Dataset{}, tr), DataError);
}

TEST_CASE("train log format") {
  const std::string csv = format_train_log({{1, 0.5, 0.75}, {2, 0.1, 1.0}});
  CHECK(csv == "epoch,train_loss,valid_uar\n1,0.5,0.75\n2,0.10000000000000001,1\n");
}
