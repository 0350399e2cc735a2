// tools/wavefront.cc

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

// Command-line front end: train, eval, extract, inspect, gradcheck, synth,
// validate, aggregate.
//
// Exit codes: 0 success, 2 configuration or usage error, 3 data error,
// 4 numeric error (including a failed gradient check).

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "wavefront/checkpoint.h"
#include "wavefront/data.h"
#include "wavefront/error.h"
#include "wavefront/gradcheck.h"
#include "wavefront/model.h"
#include "wavefront/train.h"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace wavefront;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw IoError("failed writing '" + path + "'");
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    write_text(path, text);
  }
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory '" + dir + "': " + ec.message());
}

std::optional<PcenLearnMask> parse_mask_option(const std::string& text) {
  if (text.empty()) return std::nullopt;
  try {
    return PcenLearnMask::parse(text);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("--pcen-learn: ") + e.what());
  }
}

std::string matrix_csv(const Matrix& m) {
  std::string out;
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) {
      if (c) out += ',';
      out += fmt(m(r, c));
    }
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// train

struct TrainArgs {
  std::string manifest;
  std::string frontend = "mel";
  std::string pcen_learn;
  std::uint64_t seed = 1;
  std::size_t epochs = 100;
  std::size_t patience = 10;
  std::string checkpoint;
  std::string out_dir = "run";
  bool list_configs = false;
};

int cmd_train(const TrainArgs& a) {
  if (a.list_configs) {
    for (const RunConfig& c : ablation_configs()) {
      std::cout << c.tag() << '\t' << c.flags() << '\n';
    }
    return kExitOk;
  }
  if (a.manifest.empty()) throw ConfigError("train: --manifest is required");
  RunConfig cfg;
  cfg.frontend = parse_frontend(a.frontend);
  cfg.pcen_learn = parse_mask_option(a.pcen_learn);
  cfg.seed = a.seed;
  cfg.max_epochs = a.epochs;
  cfg.patience = a.patience;
  cfg.validate();

  const Manifest m = read_manifest(a.manifest);
  validate_manifest(m);
  const Dataset train_set = load_split(m, Split::kTrain, cfg);
  const Dataset valid_set = load_split(m, Split::kValid, cfg);

  ensure_dir(a.out_dir);
  const std::string ckpt_path =
      a.checkpoint.empty() ? (fs::path(a.out_dir) / "best.ckpt").string() : a.checkpoint;
  TrainOptions opt;
  opt.threads = evaluation_threads();
  opt.on_epoch = [](const EpochLog& e) {
    std::fprintf(stderr, "epoch %zu  train_loss %.6f  valid_uar %.4f\n", e.epoch, e.train_loss,
                 e.valid_uar);
  };
  const TrainResult r = train(cfg, train_set, valid_set, opt);

  write_checkpoint(ckpt_path, r.best);
  write_text((fs::path(a.out_dir) / "train_log.csv").string(), format_train_log(r.log));
  json echo;
  echo["frontend"] = to_string(cfg.frontend);
  echo["pcen_learn"] = cfg.pipeline().pcen_learn.to_string();
  echo["seed"] = cfg.seed;
  echo["max_epochs"] = cfg.max_epochs;
  echo["patience"] = cfg.patience;
  echo["learning_rate"] = cfg.learning_rate;
  echo["momentum"] = cfg.momentum;
  echo["duration_s"] = cfg.duration_s;
  echo["preemphasis"] = cfg.preemphasis;
  echo["manifest"] = a.manifest;
  echo["checkpoint"] = ckpt_path;
  echo["pipeline"] = cfg.pipeline().canonical();
  echo["epochs_run"] = r.log.size();
  echo["best_epoch"] = r.best_epoch;
  echo["best_valid_uar"] = r.best_valid_uar;
  write_text((fs::path(a.out_dir) / "config.json").string(), echo.dump(2) + "\n");
  std::fprintf(stderr, "best epoch %zu  valid_uar %.4f  -> %s\n", r.best_epoch, r.best_valid_uar,
               ckpt_path.c_str());
  return kExitOk;
}

// ---------------------------------------------------------------------------
// eval

struct EvalArgs {
  std::string checkpoint;
  std::string manifest;
  std::string split = "test";
  std::string frontend;
  std::string out;
};

int cmd_eval(const EvalArgs& a) {
  const Checkpoint ckpt = read_checkpoint(a.checkpoint);
  const Pipeline model = restore_pipeline(ckpt);
  const PipelineConfig& pc = model.config();
  if (!a.frontend.empty() && parse_frontend(a.frontend) != pc.frontend) {
    throw ConfigError("checkpoint was trained with frontend " + to_string(pc.frontend) +
                      ", not " + a.frontend);
  }
  Split split;
  try {
    split = parse_split(a.split);
  } catch (const FormatError& e) {
    throw ConfigError(std::string("--split: ") + e.what());
  }
  RunConfig cfg;
  cfg.frontend = pc.frontend;
  const Manifest m = read_manifest(a.manifest);
  const Dataset data = load_split(m, split, cfg);
  if (data.size() == 0) throw DataError("split " + a.split + " is empty");
  const Predictions p = predict(model, prepare_all(model, data), evaluation_threads());
  const ClassificationReport rep = classification_report(p.labels, data.labels);

  json j;
  j["checkpoint"] = a.checkpoint;
  j["frontend"] = to_string(pc.frontend);
  j["pcen_learn"] = pc.pcen_learn.to_string();
  j["seed"] = ckpt.seed;
  j["epoch"] = ckpt.epoch;
  j["split"] = a.split;
  j["n"] = data.size();
  j["uar"] = rep.uar;
  json recalls = json::object();
  for (std::size_t l = 0; l < rep.recalls.size(); ++l) {
    recalls[label_name(l)] = std::isnan(rep.recalls[l]) ? json(nullptr) : json(rep.recalls[l]);
  }
  j["recalls"] = recalls;
  j["confusion"] = rep.confusion;
  j["confusion_axes"] = "rows=truth, cols=prediction, order=[control, dysarthric]";
  emit(a.out, j.dump(2) + "\n");
  return kExitOk;
}

// ---------------------------------------------------------------------------
// extract

struct ExtractArgs {
  std::string wav;
  std::string frontend;
  std::string checkpoint;
  std::string out;
  std::string correlation_out;
};

int cmd_extract(const ExtractArgs& a) {
  std::optional<Pipeline> model;
  if (!a.checkpoint.empty()) {
    model.emplace(restore_pipeline(read_checkpoint(a.checkpoint)));
    if (!a.frontend.empty() && parse_frontend(a.frontend) != model->config().frontend) {
      throw ConfigError("checkpoint was trained with frontend " +
                        to_string(model->config().frontend) + ", not " + a.frontend);
    }
  } else {
    RunConfig rc;
    rc.frontend = parse_frontend(a.frontend.empty() ? "mel" : a.frontend);
    model.emplace(rc.pipeline(), 0);
  }
  RunConfig cond;
  const Waveform w = condition_waveform(read_wav(a.wav), cond);
  const FeatureMap feats = model->features(model->prepare(w));
  emit(a.out, matrix_csv(feats.values));

  if (!a.correlation_out.empty()) {
    const FeatureMap mel = model->mel().log_features(w);
    const std::vector<double> corr = channel_correlations(feats, mel);
    std::string csv = "channel,pearson_vs_log_mel\n";
    std::size_t above = 0;
    for (std::size_t c = 0; c < corr.size(); ++c) {
      csv += std::to_string(c) + ',' + fmt(corr[c]) + '\n';
      if (corr[c] >= 0.9) ++above;
    }
    emit(a.correlation_out, csv);
    std::fprintf(stderr, "%zu of %zu channels with correlation >= 0.9\n", above, corr.size());
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// inspect

struct InspectArgs {
  std::string checkpoint;
  std::string out_dir = ".";
  bool filters = false;
  bool compression = false;
};

int cmd_inspect(const InspectArgs& a) {
  const Pipeline model = restore_pipeline(read_checkpoint(a.checkpoint));
  const FrontendKind kind = model.config().frontend;
  const bool want_all = !a.filters && !a.compression;
  if (a.filters && !uses_tdfb(kind)) {
    throw ConfigError("checkpoint (" + to_string(kind) + ") has no learnable filterbank");
  }
  if (a.compression && !uses_pcen(kind)) {
    throw ConfigError("checkpoint (" + to_string(kind) + ") has no PCEN layer");
  }
  if (want_all && !uses_tdfb(kind) && !uses_pcen(kind)) {
    throw ConfigError("checkpoint (" + to_string(kind) + ") has no frontend parameters to inspect");
  }
  ensure_dir(a.out_dir);
  if (uses_tdfb(kind) && (a.filters || want_all)) {
    std::string csv = "filter,learned_hz,init_hz\n";
    for (const auto& row : center_frequency_report(model.tdfb())) {
      csv += std::to_string(row.filter) + ',' + fmt(row.learned_hz) + ',' + fmt(row.init_hz) + '\n';
    }
    const std::string path = (fs::path(a.out_dir) / "filter_scale.csv").string();
    write_text(path, csv);
    std::cout << path << '\n';
  }
  if (uses_pcen(kind) && (a.compression || want_all)) {
    std::string csv = "channel,r_abs,alpha,delta\n";
    for (const auto& row : compression_report(model.pcen())) {
      csv += std::to_string(row.channel) + ',' + fmt(row.r_abs) + ',' + fmt(row.alpha) + ',' +
             fmt(row.delta) + '\n';
    }
    const std::string path = (fs::path(a.out_dir) / "compression.csv").string();
    write_text(path, csv);
    std::cout << path << '\n';
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// gradcheck

struct GradcheckArgs {
  std::string op = "all";
  bool list = false;
  double perturb = 0.0;
};

int cmd_gradcheck(const GradcheckArgs& a) {
  if (a.list) {
    for (const auto& name : gradcheck_ops()) std::cout << name << '\n';
    return kExitOk;
  }
  GradcheckOptions opt;
  opt.perturb_analytic = a.perturb;
  std::vector<GradcheckRow> rows;
  try {
    rows = run_gradcheck(a.op, opt);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  bool ok = true;
  std::printf("%-36s %-18s %7s %12s %9s  %s\n", "op", "tensor", "entries", "max_rel_err",
              "threshold", "result");
  for (const auto& r : rows) {
    std::printf("%-36s %-18s %7zu %12.3e %9.0e  %s\n", r.op.c_str(), r.tensor.c_str(), r.entries,
                r.max_rel_error, r.threshold, r.passed ? "pass" : "FAIL");
    ok = ok && r.passed;
  }
  return ok ? kExitOk : kExitNumeric;
}

// ---------------------------------------------------------------------------
// synth, validate, aggregate

struct SynthArgs {
  std::string out_dir = "synthetic";
  std::uint64_t seed = 1;
  std::size_t n_train = 200;
  std::size_t n_valid = 50;
  std::size_t n_test = 80;
};

int cmd_synth(const SynthArgs& a) {
  SyntheticSpec spec;
  spec.seed = a.seed;
  spec.n_train = a.n_train;
  spec.n_valid = a.n_valid;
  spec.n_test = a.n_test;
  const Manifest m = generate_synthetic(spec, a.out_dir);
  std::cout << (fs::path(a.out_dir) / "manifest.csv").string() << " (" << m.records.size()
            << " utterances)\n";
  return kExitOk;
}

struct ValidateArgs {
  std::string manifest;
  bool skip_files = false;
};

int cmd_validate(const ValidateArgs& a) {
  const ManifestReport rep = validate_manifest(read_manifest(a.manifest), !a.skip_files);
  std::cout << "split,control,dysarthric\n";
  for (Split s : kAllSplits) {
    const auto& c = rep.counts.at(s);
    std::cout << to_string(s) << ',' << c[0] << ',' << c[1] << '\n';
  }
  return kExitOk;
}

struct AggregateArgs {
  std::vector<std::string> reports;
  std::string out;
};

int cmd_aggregate(const AggregateArgs& a) {
  std::map<std::string, std::vector<double>> groups;
  std::vector<std::string> order;
  for (const auto& path : a.reports) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open report '" + path + "'");
    json j;
    try {
      j = json::parse(in);
    } catch (const json::exception& e) {
      throw FormatError("json", path + ": " + e.what());
    }
    if (!j.contains("frontend") || !j.contains("uar") || !j.contains("split")) {
      throw FormatError("json", path + ": not an eval report");
    }
    std::string key = j["frontend"].get<std::string>();
    const std::string mask = j.value("pcen_learn", "none");
    if (mask != "none") key += "[" + mask + "]";
    key += "," + j["split"].get<std::string>();
    if (!groups.count(key)) order.push_back(key);
    groups[key].push_back(j["uar"].get<double>());
  }
  std::string csv = "config,split,runs,uar_mean,uar_std,uar_percent\n";
  for (const auto& key : order) {
    const Summary s = summarize(groups[key]);
    char pct[64];
    std::snprintf(pct, sizeof(pct), "%.1f +/- %.1f", 100.0 * s.mean, 100.0 * s.stddev);
    csv += key + ',' + std::to_string(s.n) + ',' + fmt(s.mean) + ',' + fmt(s.stddev) + ',' + pct +
           '\n';
  }
  emit(a.out, csv);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"wavefront: learnable audio frontends for dysarthria detection"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "wavefront 1.0.0");

  TrainArgs train_args;
  auto* train_cmd = app.add_subcommand("train", "Train a model with early stopping");
  train_cmd->add_option("--manifest", train_args.manifest, "Manifest CSV");
  train_cmd->add_option("--frontend", train_args.frontend,
                        "mel, mel_mvn, mel_pcen, tdfb or tdfb_pcen")
      ->capture_default_str();
  train_cmd->add_option("--pcen-learn", train_args.pcen_learn,
                        "Learnable PCEN tensors, subset of r,alpha,delta (PCEN frontends only)");
  train_cmd->add_option("--seed", train_args.seed)->capture_default_str();
  train_cmd->add_option("--epochs", train_args.epochs, "Maximum epochs")->capture_default_str();
  train_cmd->add_option("--patience", train_args.patience, "Early-stopping patience")
      ->capture_default_str();
  train_cmd->add_option("--checkpoint", train_args.checkpoint,
                        "Best-checkpoint path (default <out-dir>/best.ckpt)");
  train_cmd->add_option("--out-dir", train_args.out_dir)->capture_default_str();
  train_cmd->add_flag("--list-configs", train_args.list_configs,
                      "Print every ablation configuration and exit");

  EvalArgs eval_args;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a checkpoint on one split (JSON)");
  eval_cmd->add_option("--checkpoint", eval_args.checkpoint)->required();
  eval_cmd->add_option("--manifest", eval_args.manifest)->required();
  eval_cmd->add_option("--split", eval_args.split)->capture_default_str();
  eval_cmd->add_option("--frontend", eval_args.frontend, "Expected frontend (checked)");
  eval_cmd->add_option("--out", eval_args.out, "Report path (default stdout)");

  ExtractArgs extract_args;
  auto* extract_cmd = app.add_subcommand("extract", "Write frontend features as CSV");
  extract_cmd->add_option("--wav", extract_args.wav)->required();
  extract_cmd->add_option("--frontend", extract_args.frontend, "Frontend at init (default mel)");
  extract_cmd->add_option("--checkpoint", extract_args.checkpoint, "Use trained parameters");
  extract_cmd->add_option("--out", extract_args.out, "Feature CSV path (default stdout)");
  extract_cmd->add_option("--correlation-out", extract_args.correlation_out,
                          "Per-channel Pearson correlation against log-mel");

  InspectArgs inspect_args;
  auto* inspect_cmd = app.add_subcommand("inspect", "Export learned filter centers and PCEN values");
  inspect_cmd->add_option("--checkpoint", inspect_args.checkpoint)->required();
  inspect_cmd->add_option("--out-dir", inspect_args.out_dir)->capture_default_str();
  inspect_cmd->add_flag("--filters", inspect_args.filters, "Require filter_scale.csv");
  inspect_cmd->add_flag("--compression", inspect_args.compression, "Require compression.csv");

  GradcheckArgs grad_args;
  auto* grad_cmd = app.add_subcommand("gradcheck", "Finite-difference gradient checks");
  grad_cmd->add_option("op", grad_args.op, "all, a group (tdfb, pcen, ...) or an op name")
      ->capture_default_str();
  grad_cmd->add_flag("--list", grad_args.list, "List registered ops");
  grad_cmd->add_option("--perturb", grad_args.perturb)->group("");

  SynthArgs synth_args;
  auto* synth_cmd = app.add_subcommand("synth", "Generate the synthetic two-class corpus");
  synth_cmd->add_option("--out-dir", synth_args.out_dir)->capture_default_str();
  synth_cmd->add_option("--seed", synth_args.seed)->capture_default_str();
  synth_cmd->add_option("--n-train", synth_args.n_train)->capture_default_str();
  synth_cmd->add_option("--n-valid", synth_args.n_valid)->capture_default_str();
  synth_cmd->add_option("--n-test", synth_args.n_test)->capture_default_str();

  ValidateArgs validate_args;
  auto* validate_cmd = app.add_subcommand("validate", "Check a manifest's split protocol");
  validate_cmd->add_option("--manifest", validate_args.manifest)->required();
  validate_cmd->add_flag("--skip-files", validate_args.skip_files, "Do not check file existence");

  AggregateArgs agg_args;
  auto* agg_cmd = app.add_subcommand("aggregate", "Mean and std of UAR over eval reports");
  agg_cmd->add_option("reports", agg_args.reports, "Eval JSON files")->required();
  agg_cmd->add_option("--out", agg_args.out, "CSV path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*train_cmd) return cmd_train(train_args);
    if (*eval_cmd) return cmd_eval(eval_args);
    if (*extract_cmd) return cmd_extract(extract_args);
    if (*inspect_cmd) return cmd_inspect(inspect_args);
    if (*grad_cmd) return cmd_gradcheck(grad_args);
    if (*synth_cmd) return cmd_synth(synth_args);
    if (*validate_cmd) return cmd_validate(validate_args);
    if (*agg_cmd) return cmd_aggregate(agg_args);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const DataError& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return kExitData;
  } catch (const NumericError& e) {
    std::fprintf(stderr, "numeric error: %s\n", e.what());
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConfig;
  }
  return kExitConfig;
}
