// tests/test_cli.cc

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

#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "wavefront/checkpoint.h"
#include "wavefront/data.h"
#include "wavefront/model.h"

using namespace wavefront;
namespace fs = std::filesystem;

namespace {

const fs::path& workdir() {
  static const fs::path dir = [] {
    const fs::path d = fs::temp_directory_path() / "wavefront_test_cli";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

// Runs the CLI with `args`, capturing stdout into `out` when given.
int run(const std::string& args, std::string* out = nullptr) {
  const fs::path stdout_path = workdir() / "stdout.txt";
  const std::string cmd = std::string(WAVEFRONT_CLI) + " " + args + " > " +
                          stdout_path.string() + " 2> " + (workdir() / "stderr.txt").string();
  const int status = std::system(cmd.c_str());
  if (out) {
    std::ifstream in(stdout_path);
    *out = std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  }
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

std::vector<std::string> fields(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  for (std::string f; std::getline(in, f, ',');) out.push_back(f);
  return out;
}

const fs::path& corpus() {
  static const fs::path dir = [] {
    const fs::path d = workdir() / "corpus";
    REQUIRE(run("synth --out-dir " + d.string() + " --seed 4 --n-train 12 --n-valid 8 --n-test 8") == 0);
    return d;
  }();
  return dir;
}

std::string manifest() { return (corpus() / "manifest.csv").string(); }

const fs::path& mel_run() {
  static const fs::path dir = [] {
    const fs::path d = workdir() / "mel_run";
    REQUIRE(run("train --manifest " + manifest() + " --frontend mel --seed 2 --epochs 3 --out-dir " +
                d.string()) == 0);
    return d;
  }();
  return dir;
}

}  // namespace

TEST_CASE("gradcheck command") {
  std::string out;
  CHECK(run("gradcheck all", &out) == 0);
  CHECK(out.find("FAIL") == std::string::npos);
  CHECK(run("gradcheck pcen", &out) == 0);
  for (const auto& line : lines(out)) {
    CHECK(line.find("tdfb.") == std::string::npos);
    CHECK(line.find("lstm_attention") == std::string::npos);
    CHECK(line.find("end_to_end") == std::string::npos);
  }
  CHECK(out.find("pcen.alpha") != std::string::npos);
  CHECK(run("gradcheck all --perturb 0.01", &out) == 4);
  CHECK(out.find("FAIL") != std::string::npos);
  CHECK(run("gradcheck conv") == 2);
  CHECK(run("gradcheck --list", &out) == 0);
  CHECK(out.find("end_to_end.tdfb_pcen.alpha") != std::string::npos);
}

TEST_CASE("usage and config errors exit 2") {
  CHECK(run("") == 2);
  CHECK(run("train --frobnicate") == 2);
  const fs::path out = workdir() / "never";
  CHECK(run("train --manifest " + manifest() + " --frontend mel_mvn --pcen-learn r --out-dir " +
            out.string()) == 2);
  CHECK_FALSE(fs::exists(out));
  CHECK(run("train --manifest " + manifest() + " --frontend mfcc") == 2);
}

TEST_CASE("list configs") {
  std::string out;
  CHECK(run("train --list-configs", &out) == 0);
  CHECK(lines(out).size() == 9);
  CHECK(out.find("--frontend tdfb_pcen --pcen-learn alpha") != std::string::npos);
}

TEST_CASE("data errors exit 3") {
  CHECK(run("validate --manifest " + (workdir() / "missing.csv").string()) == 3);

  Waveform w;
  w.samples.assign(100, 0.0);
  std::string bytes = encode_wav(w);
  bytes[24] = static_cast<char>(0x44);  // 44100 Hz
  bytes[25] = static_cast<char>(0xAC);
  const fs::path wav = workdir() / "cd_rate.wav";
  std::ofstream(wav, std::ios::binary) << bytes;
  CHECK(run("extract --wav " + wav.string()) == 3);
}

TEST_CASE("synthetic manifest validates") {
  std::string out;
  CHECK(run("validate --manifest " + manifest(), &out) == 0);
  CHECK(out.find("train") != std::string::npos);
}

TEST_CASE("extract of a silent file is all zeros with 64 x 248 values") {
  Waveform w;
  w.samples.assign(40000, 0.0);
  const fs::path wav = workdir() / "silence.wav";
  write_wav(wav.string(), w);
  const fs::path csv = workdir() / "silence.csv";
  REQUIRE(run("extract --wav " + wav.string() + " --frontend mel --out " + csv.string()) == 0);
  const auto rows = lines(slurp(csv));
  REQUIRE(rows.size() == 64);
  for (const auto& row : rows) {
    const auto cols = fields(row);
    CHECK(cols.size() == 248);
    for (const auto& v : cols) CHECK(std::stod(v) == 0.0);
  }
}

TEST_CASE("train writes artifacts and is reproducible") {
  const fs::path a = mel_run();
  for (const char* f : {"best.ckpt", "train_log.csv", "config.json"}) CHECK(fs::exists(a / f));
  const auto log = lines(slurp(a / "train_log.csv"));
  CHECK(log.front() == "epoch,train_loss,valid_uar");
  CHECK(log.size() == 4);

  const fs::path b = workdir() / "mel_run_again";
  REQUIRE(run("train --manifest " + manifest() + " --frontend mel --seed 2 --epochs 3 --out-dir " +
              b.string()) == 0);
  CHECK(slurp(a / "train_log.csv") == slurp(b / "train_log.csv"));
  CHECK(slurp(a / "best.ckpt") == slurp(b / "best.ckpt"));
  std::string echo = slurp(b / "config.json");
  const std::string from = b.string(), to = a.string();
  for (auto at = echo.find(from); at != std::string::npos; at = echo.find(from, at + to.size())) {
    echo.replace(at, from.size(), to);
  }
  CHECK(echo == slurp(a / "config.json"));
}

TEST_CASE("eval reproduces the logged best validation UAR") {
  double best = -1.0;
  const auto log = lines(slurp(mel_run() / "train_log.csv"));
  for (std::size_t i = 1; i < log.size(); ++i) best = std::max(best, std::stod(fields(log[i])[2]));

  const fs::path report = workdir() / "eval_valid.json";
  REQUIRE(run("eval --checkpoint " + (mel_run() / "best.ckpt").string() + " --manifest " +
              manifest() + " --split valid --out " + report.string()) == 0);
  const auto j = nlohmann::json::parse(slurp(report));
  CHECK(j["uar"].get<double>() == best);
  CHECK(j["frontend"] == "mel");
  CHECK(j["n"] == 8);
  std::size_t total = 0;
  for (const auto& row : j["confusion"]) {
    for (const auto& v : row) total += v.get<std::size_t>();
  }
  CHECK(total == 8);

  CHECK(run("eval --checkpoint " + (mel_run() / "best.ckpt").string() + " --manifest " +
            manifest() + " --frontend tdfb") == 2);

  std::string csv;
  CHECK(run("aggregate " + report.string() + " " + report.string(), &csv) == 0);
  const auto rows = lines(csv);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0] == "config,split,runs,uar_mean,uar_std,uar_percent");
  CHECK(rows[1].rfind("mel,valid,2,", 0) == 0);
  CHECK(rows[1].find("+/- 0.0") != std::string::npos);
}

TEST_CASE("inspect exports") {
  CHECK(run("inspect --checkpoint " + (mel_run() / "best.ckpt").string() + " --filters") == 2);
  CHECK(run("inspect --checkpoint " + (mel_run() / "best.ckpt").string()) == 2);

  PipelineConfig pc;
  pc.frontend = FrontendKind::kTdfbPcen;
  pc.pcen_learn = PcenLearnMask::parse("r,alpha,delta");
  const Pipeline fresh(pc, 1);
  const SgdMomentum opt(0.001, 0.98, fresh.zero_gradients());
  const fs::path ckpt = workdir() / "fresh.ckpt";
  write_checkpoint(ckpt.string(), make_checkpoint(fresh, opt, 0));

  const fs::path out = workdir() / "inspect";
  REQUIRE(run("inspect --checkpoint " + ckpt.string() + " --out-dir " + out.string()) == 0);
  const auto comp = lines(slurp(out / "compression.csv"));
  REQUIRE(comp.size() == 65);
  CHECK(comp[0] == "channel,r_abs,alpha,delta");
  for (std::size_t c = 1; c < comp.size(); ++c) {
    const auto f = fields(comp[c]);
    CHECK(std::stod(f[1]) == 0.5);
    CHECK(std::stod(f[2]) == 0.98);
    CHECK(std::stod(f[3]) == 2.0);
  }
  const auto scale = lines(slurp(out / "filter_scale.csv"));
  REQUIRE(scale.size() == 65);
  for (std::size_t n = 1; n < scale.size(); ++n) {
    const auto f = fields(scale[n]);
    CHECK(std::abs(std::stod(f[1]) - std::stod(f[2])) <= 31.25);
  }
}
