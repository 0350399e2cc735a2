// tests/test_model.cc

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
#include <filesystem>

#include "doctest.h"
#include "wavefront/checkpoint.h"
#include "wavefront/error.h"
#include "wavefront/model.h"
#include "wavefront/rng.h"

using namespace wavefront;

namespace {

Waveform noise(std::size_t n, std::uint64_t seed, double scale = 0.1) {
  Rng rng(seed);
  Waveform w;
  for (std::size_t i = 0; i < n; ++i) w.samples.push_back(scale * rng.normal());
  return w;
}

PipelineConfig config(FrontendKind kind, const char* mask = "r,alpha,delta") {
  PipelineConfig c;
  c.frontend = kind;
  c.pcen_learn = PcenLearnMask::parse(uses_pcen(kind) ? mask : "none");
  return c;
}

// A small pipeline so gradient tests stay fast.
PipelineConfig tiny(FrontendKind kind, const char* mask = "r,alpha,delta") {
  PipelineConfig c = config(kind, mask);
  c.mel.n_filters = 4;
  c.mel.win_len = 32;
  c.mel.hop = 16;
  c.mel.n_fft = 32;
  c.tdfb.n_filters = 4;
  c.tdfb.width = 17;
  c.tdfb.lowpass_width = 32;
  c.tdfb.stride = 16;
  c.hidden = 5;
  c.attention = 3;
  return c;
}

std::vector<std::string> names(const Pipeline& p) {
  std::vector<std::string> out;
  for (const auto& t : p.tensors()) out.push_back(t.name);
  return out;
}

}  // namespace

TEST_CASE("frontend names") {
  for (FrontendKind k : all_frontends()) CHECK(parse_frontend(to_string(k)) == k);
  CHECK(all_frontends().size() == 5);
  CHECK_THROWS_AS(parse_frontend("mfcc"), ConfigError);
  CHECK(uses_pcen(FrontendKind::kMelPcen));
  CHECK(uses_pcen(FrontendKind::kTdfbPcen));
  CHECK_FALSE(uses_pcen(FrontendKind::kMelMvn));
  CHECK(uses_tdfb(FrontendKind::kTdfb));
  CHECK_FALSE(uses_tdfb(FrontendKind::kMelPcen));
}

TEST_CASE("canonical config round trip") {
  for (FrontendKind k : all_frontends()) {
    const PipelineConfig c = config(k, "r");
    const PipelineConfig back = PipelineConfig::from_canonical(c.canonical());
    CHECK(back.canonical() == c.canonical());
    CHECK(back.frontend == k);
  }
  CHECK(config(FrontendKind::kMel).canonical().find("pcen_learn=none") != std::string::npos);
  CHECK_THROWS(PipelineConfig::from_canonical("frontend=mel;bogus"));
}

TEST_CASE("tensor sets per frontend") {
  const std::vector<std::string> head = {"lstm.wx", "lstm.wh", "lstm.b",  "attn.w1", "attn.b1",
                                         "attn.w2", "attn.b2", "out.w",   "out.b"};
  auto with = [&](std::vector<std::string> front) {
    front.insert(front.end(), head.begin(), head.end());
    return front;
  };
  CHECK(names(Pipeline(tiny(FrontendKind::kMel), 1)) == head);
  CHECK(names(Pipeline(tiny(FrontendKind::kMelMvn), 1)) == head);
  CHECK(names(Pipeline(tiny(FrontendKind::kMelPcen), 1)) ==
        with({"pcen.alpha", "pcen.delta", "pcen.r"}));
  CHECK(names(Pipeline(tiny(FrontendKind::kTdfb), 1)) == with({"tdfb.conv_taps"}));
  CHECK(names(Pipeline(tiny(FrontendKind::kTdfbPcen), 1)) ==
        with({"tdfb.conv_taps", "pcen.alpha", "pcen.delta", "pcen.r"}));

  const Pipeline only_r(tiny(FrontendKind::kTdfbPcen, "r"), 1);
  for (const auto& t : only_r.tensors()) {
    const bool frozen = t.name == "pcen.alpha" || t.name == "pcen.delta";
    CHECK(t.trainable == !frozen);
  }
}

TEST_CASE("log compression only on the plain TD frontend") {
  CHECK(Pipeline(tiny(FrontendKind::kTdfb), 1).tdfb().apply_log);
  CHECK_FALSE(Pipeline(tiny(FrontendKind::kTdfbPcen), 1).tdfb().apply_log);
}

TEST_CASE("every frontend yields 64x248 for 2.5 s at 16 kHz") {
  const Waveform w = noise(40000, 1);
  for (FrontendKind k : all_frontends()) {
    const Pipeline p(config(k), 1);
    const FeatureMap f = p.features(p.prepare(w));
    CHECK(f.channels() == 64);
    CHECK(f.frames() == 248);
    const ForwardResult r = p.forward(p.prepare(w));
    CHECK(r.logits.size() == 2);
    CHECK(r.attention_weights.size() == 248);
  }
}

TEST_CASE("fresh pipelines carry the documented initial values") {
  const Pipeline p(config(FrontendKind::kTdfbPcen), 3);
  for (std::size_t c = 0; c < 64; ++c) {
    CHECK(p.pcen().r(0, c) == 0.5);
    CHECK(p.pcen().alpha(0, c) == 0.98);
    CHECK(p.pcen().delta(0, c) == 2.0);
  }
  CHECK(p.tdfb().conv_taps == init_tdfb_params(TdfbConfig{}, MelConfig{}).conv_taps);
  const Pipeline q(config(FrontendKind::kTdfbPcen), 3);
  CHECK(p.head().lstm_wx == q.head().lstm_wx);
  const Pipeline other(config(FrontendKind::kTdfbPcen), 4);
  CHECK_FALSE(p.head().lstm_wx == other.head().lstm_wx);
}

TEST_CASE("gradients are deterministic and frozen tensors are zero") {
  const Waveform w = noise(400, 2, 0.5);
  for (FrontendKind k : all_frontends()) {
    const Pipeline p(tiny(k, "alpha"), 5);
    const PreparedInput in = p.prepare(w);
    const auto a = p.loss_and_gradients(in, 1);
    const auto b = p.loss_and_gradients(in, 1);
    CHECK(a.loss == b.loss);
    const auto ta = a.grads.tensors(), tb = b.grads.tensors();
    REQUIRE(ta.size() == tb.size());
    for (std::size_t i = 0; i < ta.size(); ++i) CHECK(*ta[i].tensor == *tb[i].tensor);
    if (uses_pcen(k)) {
      for (double v : a.grads.pcen_r.values()) CHECK(v == 0.0);
      for (double v : a.grads.pcen_delta.values()) CHECK(v == 0.0);
      double norm = 0.0;
      for (double v : a.grads.pcen_alpha.values()) norm += std::abs(v);
      CHECK(norm > 0.0);
    }
  }
  const Pipeline p(tiny(FrontendKind::kMel), 1);
  CHECK_THROWS_AS(p.backward({0.1, -0.1}, PipelineCache{}), std::invalid_argument);
}

TEST_CASE("sgd with momentum") {
  Pipeline p(tiny(FrontendKind::kMelPcen, "r"), 7);
  const Pipeline before = p;
  SgdMomentum opt(0.001, 0.98, p.zero_gradients());
  opt.step(p, p.zero_gradients());
  for (std::size_t i = 0; i < p.tensors().size(); ++i) {
    CHECK(*p.tensors()[i].tensor == *before.tensors()[i].tensor);
  }

  // First step from zero velocity is plain SGD; frozen tensors never move.
  Gradients g = p.zero_gradients();
  for (auto& t : g.tensors()) t.tensor->fill(0.25);
  opt.step(p, g);
  const auto now = p.tensors();
  const auto was = before.tensors();
  for (std::size_t i = 0; i < now.size(); ++i) {
    for (std::size_t k = 0; k < now[i].tensor->size(); ++k) {
      const double expect = now[i].trainable ? (*was[i].tensor)[k] - 0.001 * 0.25 : (*was[i].tensor)[k];
      CHECK((*now[i].tensor)[k] == expect);
    }
  }

  Gradients wrong = p.zero_gradients();
  wrong.head.out_b = Matrix(1, 3);
  CHECK_THROWS_AS(opt.step(p, wrong), std::invalid_argument);
  CHECK_THROWS_AS(SgdMomentum(0.0, 0.9, p.zero_gradients()), std::invalid_argument);
  CHECK_THROWS_AS(SgdMomentum(0.1, 1.0, p.zero_gradients()), std::invalid_argument);
}

TEST_CASE("constant gradient drives the velocity to g / (1 - mu)") {
  Pipeline p(tiny(FrontendKind::kMel), 8);
  SgdMomentum opt(0.001, 0.98, p.zero_gradients());
  Gradients g = p.zero_gradients();
  g.head.out_b.fill(1.0);
  auto velocity = [&] { return opt.velocity().head.out_b(0, 0); };
  for (int k = 1; k <= 300; ++k) {
    opt.step(p, g);
    const double closed = (1.0 - std::pow(0.98, k)) / (1.0 - 0.98);
    if (k == 200) CHECK(std::abs(velocity() - closed) <= 1e-10 * closed);
    if (k >= 228) CHECK(std::abs(velocity() - 50.0) <= 0.01 * 50.0);
  }
  CHECK(velocity() < 50.0);
}

TEST_CASE("checkpoint round trip is bit exact") {
  Pipeline p(tiny(FrontendKind::kTdfbPcen, "r,delta"), 9);
  SgdMomentum opt(0.001, 0.98, p.zero_gradients());
  const Waveform w = noise(400, 3, 0.5);
  opt.step(p, p.loss_and_gradients(p.prepare(w), 0).grads);
  const Checkpoint c = make_checkpoint(p, opt, 4);
  CHECK(c.epoch == 4);
  CHECK(c.seed == 9);
  CHECK(c.has("velocity/tdfb.conv_taps"));
  const std::string bytes = serialize_checkpoint(c);
  const Checkpoint back = deserialize_checkpoint(bytes);
  CHECK(back == c);
  CHECK(serialize_checkpoint(back) == bytes);

  const Pipeline restored = restore_pipeline(back);
  CHECK(restored.config().canonical() == p.config().canonical());
  const auto a = restored.tensors();
  const auto b = p.tensors();
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(*a[i].tensor == *b[i].tensor);
  const SgdMomentum opt2 = restore_optimizer(back, restored);
  CHECK(opt2.velocity().conv_taps == opt.velocity().conv_taps);
  CHECK(restored.forward(restored.prepare(w)).logits == p.forward(p.prepare(w)).logits);

  const auto path = (std::filesystem::temp_directory_path() / "wavefront_test.ckpt").string();
  write_checkpoint(path, c);
  CHECK(read_checkpoint(path) == c);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(read_checkpoint(path), IoError);
}

TEST_CASE("corrupt checkpoints are rejected") {
  const Pipeline p(tiny(FrontendKind::kMel), 1);
  const SgdMomentum opt(0.001, 0.98, p.zero_gradients());
  const std::string good = serialize_checkpoint(make_checkpoint(p, opt, 1));

  auto field_of = [](const std::string& bytes) -> std::string {
    try {
      deserialize_checkpoint(bytes);
    } catch (const FormatError& e) {
      return e.field();
    }
    return "";
  };
  std::string bad = good;
  bad[0] = 'X';
  CHECK(field_of(bad) == "magic");
  bad = good;
  bad[8] = 9;
  CHECK(field_of(bad) == "version");
  bad = good;
  bad[20] ^= 1;  // inside the config string
  CHECK(field_of(bad) == "config_hash");
  CHECK(field_of(good.substr(0, good.size() - 3)) == "payload");
  CHECK(field_of(good + "x") == "payload");

  Checkpoint missing = make_checkpoint(p, opt, 1);
  missing.tensors.erase(missing.tensors.begin());
  CHECK_THROWS_AS(restore_pipeline(missing), FormatError);
}
