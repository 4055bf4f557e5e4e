/**
 * Copyright 2026 The rashdx Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#include "rashdx/cli.hpp"

#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "rashdx/augment.hpp"
#include "rashdx/checkpoint.hpp"
#include "rashdx/datakit.hpp"
#include "rashdx/error.hpp"
#include "rashdx/evaluator.hpp"
#include "rashdx/explain.hpp"
#include "rashdx/service.hpp"
#include "rashdx/simclr.hpp"
#include "rashdx/source.hpp"
#include "rashdx/synthetic.hpp"
#include "rashdx/trainer.hpp"
#include "rashdx/util.hpp"

namespace rashdx::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void write_text(const fs::path &path, const std::string &text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("failed writing " + path.string());
}

void write_json(const fs::path &path, const json &j) { write_text(path, j.dump(2) + "\n"); }

fs::path run_record_path(const fs::path &primary) { return fs::path(primary.string() + ".run.json"); }

/// Accumulates the machine-readable record of one invocation. Written on
/// success and on failure, next to the primary output.
struct RunRecord {
  std::string command;
  std::vector<std::string> argv;
  std::uint64_t seed = 0;
  json config = json::object();
  json inputs = json::object();
  json outputs = json::object();
  json result = json::object();
  std::string started = iso_timestamp();
  fs::path path;

  void write(const std::string &status, const std::string &error = "") const {
    if (path.empty()) return;
    json j = {{"tool", "rashdx"},   {"version", kVersion}, {"command", command}, {"argv", argv},
              {"seed", seed},       {"config", config},    {"inputs", inputs},   {"outputs", outputs},
              {"result", result},   {"status", status},    {"started_at", started},
              {"finished_at", iso_timestamp()}};
    if (!error.empty()) j["error"] = error;
    write_json(path, j);
  }
};

KeyValueConfig load_config(const std::string &path) {
  return path.empty() ? KeyValueConfig() : KeyValueConfig::load(path);
}

std::string counts_table(const datakit::ClassCounts &counts) {
  std::ostringstream out;
  std::size_t total = 0;
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    out << kClassNames[c] << '\t' << counts[c] << '\n';
    total += counts[c];
  }
  out << "total\t" << total << '\n';
  return out.str();
}

json counts_json(const datakit::ClassCounts &counts) {
  json j = json::object();
  for (std::size_t c = 0; c < kNumClasses; ++c) j[std::string(kClassNames[c])] = counts[c];
  return j;
}

std::vector<ClassLabel> parse_class_list(const std::string &csv) {
  std::vector<ClassLabel> out;
  std::stringstream in(csv);
  std::string item;
  while (std::getline(in, item, ',')) {
    auto label = parse_class(trim(item));
    if (!label) throw ValidationError("unknown class '" + trim(item) + "'");
    out.push_back(*label);
  }
  if (out.empty()) throw ValidationError("empty class list");
  return out;
}

trainer::ClassifierModel load_model(const std::string &path) {
  Checkpoint ck = load_checkpoint(path);
  if (ck.kind != "classifier") throw ValidationError(path + " is a '" + ck.kind + "' checkpoint, not a classifier");
  return trainer::classifier_from_checkpoint(ck);
}

// SIGINT/SIGTERM stop a running server via a dedicated sigwait thread.
void serve_until_signal(service::HttpServer &server, std::ostream &out) {
  sigset_t set;
  sigemptyset(&set);
  sigaddset(&set, SIGINT);
  sigaddset(&set, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &set, nullptr);
  std::thread watcher([&server, set] {
    int sig = 0;
    sigwait(&set, &sig);
    server.stop();
  });
  out.flush();
  try {
    server.serve();
  } catch (...) {
    pthread_kill(watcher.native_handle(), SIGTERM);
    watcher.join();
    throw;
  }
  // serve() returned without a signal only if stop() came from elsewhere.
  pthread_kill(watcher.native_handle(), SIGTERM);
  watcher.join();
}

}  // namespace

int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
  CLI::App app{"rashdx: skin-rash image classification toolkit (SimCLR pretraining, fine-tuning, evaluation, "
               "Grad-CAM and an inference service)",
               "rashdx"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  std::string config_path;
  std::uint64_t seed = 0;
  auto common = [&](CLI::App *sub) {
    sub->add_option("--config", config_path, "key = value hyperparameter file")->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "seed for every stochastic step");
  };

  // dataset ------------------------------------------------------------------
  auto *dataset = app.add_subcommand("dataset", "manifest tooling");
  dataset->require_subcommand(1);

  std::string build_root, build_name = "dataset", build_out;
  bool build_unlabeled = false;
  auto *ds_build = dataset->add_subcommand("build", "scan <root>/<Class>/* (or a flat folder) into a manifest");
  ds_build->add_option("--root", build_root, "image folder")->required()->check(CLI::ExistingDirectory);
  ds_build->add_option("--name", build_name, "manifest name");
  ds_build->add_flag("--unlabeled", build_unlabeled, "take every image below root without labels");
  ds_build->add_option("--out", build_out, "manifest CSV to write")->required();
  common(ds_build);

  std::string split_manifest, split_out_dir;
  double split_fraction = 0.8;
  auto *ds_split = dataset->add_subcommand("split", "stratified train/test split");
  ds_split->add_option("--manifest", split_manifest)->required()->check(CLI::ExistingFile);
  ds_split->add_option("--train-fraction", split_fraction, "fraction of each class in the train part")
      ->check(CLI::Range(0.0, 1.0));
  ds_split->add_option("--out-dir", split_out_dir, "directory for <name>_train.csv and <name>_test.csv")->required();
  common(ds_split);

  std::string stats_manifest, stats_out;
  auto *ds_stats = dataset->add_subcommand("stats", "per-class counts");
  ds_stats->add_option("--manifest", stats_manifest)->required()->check(CLI::ExistingFile);
  ds_stats->add_option("--out", stats_out, "JSON file to write (counts are always printed)");
  common(ds_stats);

  std::string synth_out_dir;
  std::size_t synth_per_class = 80;
  int synth_size = 64;
  bool synth_unlabeled = false;
  auto *ds_synth = dataset->add_subcommand("synth", "write a procedural eight-class shape corpus and manifest");
  ds_synth->add_option("--out-dir", synth_out_dir)->required();
  ds_synth->add_option("--per-class", synth_per_class)->check(CLI::PositiveNumber);
  ds_synth->add_option("--size", synth_size, "image side in pixels")->check(CLI::Range(16, 1024));
  ds_synth->add_flag("--unlabeled", synth_unlabeled, "omit labels from the manifest");
  common(ds_synth);

  // augment ------------------------------------------------------------------
  auto *augment_cmd = app.add_subcommand("augment", "offline augmentation");
  augment_cmd->require_subcommand(1);
  std::string expand_manifest, expand_out_dir, expand_classes;
  std::size_t expand_total = 0;
  auto *aug_expand = augment_cmd->add_subcommand("expand", "grow the scarce classes to reach a total size");
  aug_expand->add_option("--manifest", expand_manifest)->required()->check(CLI::ExistingFile);
  aug_expand->add_option("--total-target", expand_total, "record count of the expanded manifest")->required();
  aug_expand->add_option("--classes", expand_classes, "comma-separated classes to grow (default: the five scarce)");
  aug_expand->add_option("--out-dir", expand_out_dir, "new images and manifest.csv go here")->required();
  common(aug_expand);

  // pretrain -----------------------------------------------------------------
  std::string pre_manifest, pre_out, pre_encoder = "tiny_cnn", pre_curve;
  int pre_epochs = 0, pre_batch_pairs = 0;
  double pre_tau = 0.0, pre_lr = 0.0;
  auto *pre = app.add_subcommand("pretrain", "SimCLR contrastive pretraining on an (unlabeled) manifest");
  pre->add_option("--manifest", pre_manifest)->required()->check(CLI::ExistingFile);
  pre->add_option("--encoder", pre_encoder, "tiny_cnn, small_cnn or tiny_mlp");
  auto *pre_epochs_opt = pre->add_option("--epochs", pre_epochs)->check(CLI::NonNegativeNumber);
  auto *pre_batch_opt = pre->add_option("--batch-pairs", pre_batch_pairs, "source images per step")->check(CLI::PositiveNumber);
  auto *pre_tau_opt = pre->add_option("--tau", pre_tau, "temperature")->check(CLI::PositiveNumber);
  auto *pre_lr_opt = pre->add_option("--lr", pre_lr)->check(CLI::PositiveNumber);
  pre->add_option("--curve", pre_curve, "per-epoch loss CSV");
  pre->add_option("--out", pre_out, "checkpoint to write")->required();
  common(pre);

  // finetune -----------------------------------------------------------------
  std::string ft_train, ft_test, ft_init, ft_encoder = "tiny_cnn", ft_out, ft_curve;
  int ft_epochs = 0, ft_batch = 0;
  double ft_lr = 0.0, ft_momentum = 0.0;
  auto *ft = app.add_subcommand("finetune", "supervised training of encoder + eight-way head");
  ft->add_option("--train", ft_train, "labeled train manifest")->required()->check(CLI::ExistingFile);
  ft->add_option("--test", ft_test, "labeled test manifest")->required()->check(CLI::ExistingFile);
  ft->add_option("--init", ft_init, "SimCLR checkpoint to start from (default: random init)")->check(CLI::ExistingFile);
  ft->add_option("--encoder", ft_encoder, "encoder when no --init is given");
  auto *ft_epochs_opt = ft->add_option("--epochs", ft_epochs)->check(CLI::PositiveNumber);
  auto *ft_batch_opt = ft->add_option("--batch-size", ft_batch)->check(CLI::PositiveNumber);
  auto *ft_lr_opt = ft->add_option("--lr", ft_lr)->check(CLI::PositiveNumber);
  auto *ft_momentum_opt = ft->add_option("--momentum", ft_momentum)->check(CLI::Range(0.0, 1.0));
  ft->add_option("--curve", ft_curve, "epoch,train_loss,test_accuracy CSV");
  ft->add_option("--out", ft_out, "best checkpoint")->required();
  common(ft);

  // evaluate / grade-eval / threshold-report -----------------------------------
  std::string ev_checkpoint, ev_manifest, ev_out, ev_csv;
  auto *ev = app.add_subcommand("evaluate", "confusion matrix and per-class metrics");
  ev->add_option("--checkpoint", ev_checkpoint)->required()->check(CLI::ExistingFile);
  ev->add_option("--manifest", ev_manifest)->required()->check(CLI::ExistingFile);
  ev->add_option("--csv", ev_csv, "per-class metrics CSV");
  ev->add_option("--out", ev_out, "report JSON")->required();
  common(ev);

  std::string ge_checkpoint, ge_manifest, ge_out, ge_by = "grade";
  auto *ge = app.add_subcommand("grade-eval", "Mpox recall per grade or stage subset");
  ge->add_option("--checkpoint", ge_checkpoint)->required()->check(CLI::ExistingFile);
  ge->add_option("--manifest", ge_manifest)->required()->check(CLI::ExistingFile);
  ge->add_option("--by", ge_by, "grade or stage")->check(CLI::IsMember({"grade", "stage"}));
  ge->add_option("--out", ge_out)->required();
  common(ge);

  std::string tr_checkpoint, tr_manifest, tr_out;
  double tr_threshold = service::kDefaultThreshold;
  auto *tr = app.add_subcommand("threshold-report", "coverage and accuracy on each side of the review threshold");
  tr->add_option("--checkpoint", tr_checkpoint)->required()->check(CLI::ExistingFile);
  tr->add_option("--manifest", tr_manifest)->required()->check(CLI::ExistingFile);
  tr->add_option("--threshold", tr_threshold)->check(CLI::Range(0.0, 1.0));
  tr->add_option("--out", tr_out)->required();
  common(tr);

  // gradcam ------------------------------------------------------------------
  std::string gc_checkpoint, gc_image, gc_out, gc_class, gc_csv;
  double gc_alpha = 0.5;
  auto *gc = app.add_subcommand("gradcam", "Grad-CAM overlay for one image");
  gc->add_option("--checkpoint", gc_checkpoint)->required()->check(CLI::ExistingFile);
  gc->add_option("--image", gc_image)->required()->check(CLI::ExistingFile);
  gc->add_option("--class", gc_class, "target class (default: the predicted one)");
  gc->add_option("--alpha", gc_alpha, "overlay opacity")->check(CLI::Range(0.0, 1.0));
  gc->add_option("--csv", gc_csv, "raw 224x224 heatmap values");
  gc->add_option("--out", gc_out, "overlay PNG")->required();
  common(gc);

  // serve --------------------------------------------------------------------
  std::string sv_checkpoint, sv_host = "127.0.0.1", sv_reference, sv_log, sv_record;
  int sv_port = 8080;
  double sv_threshold = service::kDefaultThreshold;
  std::size_t sv_max_payload = service::kDefaultMaxPayload;
  auto *sv = app.add_subcommand("serve", "HTTP inference service");
  sv->add_option("--checkpoint", sv_checkpoint)->required()->check(CLI::ExistingFile);
  sv->add_option("--host", sv_host);
  sv->add_option("--port", sv_port, "0 picks a free port")->check(CLI::Range(0, 65535));
  auto *sv_threshold_opt = sv->add_option("--threshold", sv_threshold)->check(CLI::Range(0.0, 1.0));
  auto *sv_payload_opt = sv->add_option("--max-payload", sv_max_payload, "upload cap in bytes")->check(CLI::PositiveNumber);
  auto *sv_reference_opt = sv->add_option("--reference-dir", sv_reference, "gallery root: <dir>/<Class>/<image>");
  auto *sv_log_opt = sv->add_option("--request-log", sv_log, "JSON-lines request log");
  sv->add_option("--run-record", sv_record, "where to write the run record (default: serve.run.json)");
  common(sv);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp &) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp &) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion &) {
    out << kVersion << '\n';
    return kExitOk;
  } catch (const CLI::ParseError &e) {
    // Help requested on a subcommand surfaces as CallForHelp from that sub.
    err << "usage error: " << e.what() << "\n";
    err << "run 'rashdx --help' for usage\n";
    return kExitUsage;
  }

  RunRecord record;
  record.argv = args;
  record.seed = seed;

  try {
    const KeyValueConfig config = load_config(config_path);
    if (!config_path.empty()) {
      record.inputs["config"] = config_path;
      record.config = config.values();
    }

    if (*ds_build) {
      record.command = "dataset build";
      record.path = run_record_path(build_out);
      record.inputs["root"] = build_root;
      auto manifest = datakit::scan_image_folder(build_root, !build_unlabeled, build_name);
      datakit::save_manifest(manifest, build_out);
      record.outputs["manifest"] = build_out;
      record.result = {{"records", manifest.size()}, {"fingerprint", hex64(datakit::fingerprint(manifest))}};
      out << "wrote " << manifest.size() << " records to " << build_out << "\n";

    } else if (*ds_split) {
      record.command = "dataset split";
      auto manifest = datakit::load_manifest(split_manifest);
      auto split = datakit::stratified_split(manifest, split_fraction, seed);
      const fs::path dir(split_out_dir);
      fs::create_directories(dir);
      const fs::path train_path = dir / (split.train.name() + ".csv");
      const fs::path test_path = dir / (split.test.name() + ".csv");
      record.path = dir / (manifest.name() + "_split.run.json");
      datakit::save_manifest(split.train, train_path);
      datakit::save_manifest(split.test, test_path);
      record.inputs["manifest"] = split_manifest;
      record.config["train_fraction"] = split_fraction;
      record.outputs = {{"train", train_path.string()}, {"test", test_path.string()}};
      record.result = {{"train", split.train.size()}, {"test", split.test.size()}};
      out << "train " << split.train.size() << " -> " << train_path.string() << "\n"
          << "test " << split.test.size() << " -> " << test_path.string() << "\n";

    } else if (*ds_stats) {
      record.command = "dataset stats";
      auto manifest = datakit::load_manifest(stats_manifest);
      record.inputs["manifest"] = stats_manifest;
      json stats = {{"name", manifest.name()}, {"records", manifest.size()}, {"labeled", manifest.labeled()}};
      if (manifest.labeled()) {
        auto counts = datakit::class_distribution(manifest);
        stats["counts"] = counts_json(counts);
        out << counts_table(counts);
      } else {
        out << "unlabeled\t" << manifest.size() << "\n";
      }
      record.result = stats;
      if (!stats_out.empty()) {
        write_json(stats_out, stats);
        record.outputs["stats"] = stats_out;
        record.path = run_record_path(stats_out);
      }

    } else if (*ds_synth) {
      record.command = "dataset synth";
      synthetic::ShapeStyle style;
      style.size = synth_size;
      const fs::path dir(synth_out_dir);
      auto manifest = synthetic::write_shapes_corpus(dir, synth_per_class, style, seed, !synth_unlabeled);
      const fs::path manifest_path = dir / "manifest.csv";
      datakit::save_manifest(manifest, manifest_path);
      record.path = run_record_path(manifest_path);
      record.config = {{"per_class", synth_per_class}, {"size", synth_size}, {"labeled", !synth_unlabeled}};
      record.outputs["manifest"] = manifest_path.string();
      record.result = {{"records", manifest.size()}};
      out << "wrote " << manifest.size() << " images and " << manifest_path.string() << "\n";

    } else if (*aug_expand) {
      record.command = "augment expand";
      auto manifest = datakit::load_manifest(expand_manifest);
      auto classes = expand_classes.empty() ? augment::default_scarce_classes() : parse_class_list(expand_classes);
      auto targets = augment::default_expansion_targets(datakit::class_distribution(manifest), classes, expand_total);
      augment::AugmentationPolicy policy = augment::expansion_policy(seed);
      policy.params = augment::AugmentParams::from_config(config);
      const fs::path dir(expand_out_dir);
      auto expanded = augment::expand_scarce_classes(manifest, targets, policy, dir);
      const fs::path manifest_path = dir / "manifest.csv";
      datakit::save_manifest(expanded, manifest_path);
      record.path = run_record_path(manifest_path);
      record.inputs["manifest"] = expand_manifest;
      json t = json::object();
      for (const auto &[label, n] : targets) t[std::string(name_of(label))] = n;
      record.config["targets"] = t;
      record.outputs["manifest"] = manifest_path.string();
      record.result = {{"before", manifest.size()}, {"after", expanded.size()},
                       {"counts", counts_json(datakit::class_distribution(expanded))}};
      out << manifest.size() << " -> " << expanded.size() << " records, manifest " << manifest_path.string() << "\n";

    } else if (*pre) {
      record.command = "pretrain";
      record.path = run_record_path(pre_out);
      simclr::PretrainConfig pc = simclr::PretrainConfig::from_config(config);
      if (*pre_epochs_opt) pc.epochs = pre_epochs;
      if (*pre_batch_opt) pc.batch_pairs = pre_batch_pairs;
      if (*pre_tau_opt) pc.tau = pre_tau;
      if (*pre_lr_opt) pc.lr = pre_lr;
      pc.seed = seed;
      pc.validate();
      auto manifest = datakit::load_manifest(pre_manifest);
      const std::uint64_t fp = datakit::fingerprint(manifest);
      ManifestSource data(manifest);
      nn::Encoder encoder(nn::encoder_spec(pre_encoder), mix_seed(seed, 1));
      nn::Mlp head = simclr::make_projection_head(encoder.spec().feature_dim, mix_seed(seed, 2));
      record.inputs["manifest"] = pre_manifest;
      record.config["pretrain"] = pc.to_json();
      record.config["encoder"] = pre_encoder;
      auto curve = simclr::pretrain(encoder, head, data, pc, [&](int epoch, double loss) {
        out << "epoch " << epoch << " nt_xent " << loss << "\n" << std::flush;
      });
      save_checkpoint(simclr::make_checkpoint(encoder, head, pc, curve, fp), pre_out);
      record.outputs["checkpoint"] = pre_out;
      if (!pre_curve.empty()) {
        std::ostringstream csv;
        csv.precision(10);
        csv << "epoch,nt_xent_loss\n";
        for (std::size_t i = 0; i < curve.size(); ++i) csv << i << ',' << curve[i] << '\n';
        write_text(pre_curve, csv.str());
        record.outputs["curve"] = pre_curve;
      }
      record.result = {{"loss_curve", curve}, {"corpus_fingerprint", hex64(fp)}};

    } else if (*ft) {
      record.command = "finetune";
      record.path = run_record_path(ft_out);
      trainer::TrainConfig tc = trainer::TrainConfig::from_config(config);
      if (*ft_epochs_opt) tc.epochs = ft_epochs;
      if (*ft_batch_opt) tc.batch_size = ft_batch;
      if (*ft_lr_opt) tc.lr = ft_lr;
      if (*ft_momentum_opt) tc.momentum = ft_momentum;
      tc.seed = seed;
      tc.validate();
      auto train = datakit::load_manifest(ft_train);
      auto test = datakit::load_manifest(ft_test);
      trainer::ClassifierModel model =
          ft_init.empty() ? trainer::make_classifier(nn::encoder_spec(ft_encoder), mix_seed(seed, 1))
                          : trainer::classifier_from_pretrained(load_checkpoint(ft_init), mix_seed(seed, 2));
      record.inputs = {{"train", ft_train}, {"test", ft_test}};
      if (!ft_init.empty()) record.inputs["init"] = ft_init;
      record.config["train"] = tc.to_json();
      record.config["encoder"] = model.encoder.spec().name;
      ManifestSource train_src(train), test_src(test);
      auto rec = trainer::finetune(model, train_src, test_src, tc, ft_out, [&](int epoch, double loss, double acc) {
        out << "epoch " << epoch << " loss " << loss << " test_accuracy " << acc << "\n" << std::flush;
      });
      if (!ft_curve.empty()) {
        trainer::write_curve_csv(rec, ft_curve);
        record.outputs["curve"] = ft_curve;
      }
      record.outputs["checkpoint"] = ft_out;
      record.result = {{"best_epoch", rec.best_epoch},
                       {"best_accuracy", rec.best_accuracy()},
                       {"train_loss", rec.train_loss},
                       {"test_accuracy", rec.test_accuracy},
                       {"model_version", model.version}};
      out << "best test accuracy " << rec.best_accuracy() << " at epoch " << rec.best_epoch << "\n";

    } else if (*ev) {
      record.command = "evaluate";
      record.path = run_record_path(ev_out);
      auto model = load_model(ev_checkpoint);
      ManifestSource data(datakit::load_manifest(ev_manifest));
      auto evaluation = evaluator::evaluate(model, data);
      auto report = evaluator::metrics_report(evaluator::confusion_matrix(evaluation.predictions, evaluation.truths));
      json j = evaluator::to_json(report);
      j["model_version"] = model.version;
      write_json(ev_out, j);
      record.inputs = {{"checkpoint", ev_checkpoint}, {"manifest", ev_manifest}};
      record.outputs["report"] = ev_out;
      if (!ev_csv.empty()) {
        write_text(ev_csv, evaluator::metrics_csv(report));
        record.outputs["csv"] = ev_csv;
      }
      record.result = {{"accuracy", report.accuracy}};
      out << "accuracy " << report.accuracy << "\n" << evaluator::metrics_csv(report);

    } else if (*ge) {
      record.command = "grade-eval";
      record.path = run_record_path(ge_out);
      auto model = load_model(ge_checkpoint);
      auto manifest = datakit::load_manifest(ge_manifest);
      const auto key = ge_by == "stage" ? evaluator::PartitionKey::kStage : evaluator::PartitionKey::kGrade;
      auto reports = evaluator::subset_assessment(model, manifest, key);
      json j = {{"partition", ge_by}, {"model_version", model.version}, {"subsets", evaluator::to_json(reports)}};
      write_json(ge_out, j);
      record.inputs = {{"checkpoint", ge_checkpoint}, {"manifest", ge_manifest}};
      record.outputs["report"] = ge_out;
      record.result = j["subsets"];
      out << ge_by << "\tcount\tpredicted_mpox\trecall\n";
      for (const auto &r : reports) out << r.partition << '\t' << r.count << '\t' << r.predicted_mpox << '\t' << r.recall << '\n';

    } else if (*tr) {
      record.command = "threshold-report";
      record.path = run_record_path(tr_out);
      auto model = load_model(tr_checkpoint);
      ManifestSource data(datakit::load_manifest(tr_manifest));
      auto evaluation = evaluator::evaluate(model, data);
      const std::size_t n = evaluation.truths.size();
      std::vector<double> top(n);
      auto correct = std::make_unique<bool[]>(n);  // span<const bool> cannot view a vector<bool>
      for (std::size_t i = 0; i < n; ++i) {
        top[i] = trainer::argmax_label(evaluation.probabilities[i]).second;
        correct[i] = evaluation.predictions[i] == evaluation.truths[i];
      }
      auto report = evaluator::threshold_report(top, {correct.get(), n}, tr_threshold);
      json j = evaluator::to_json(report);
      j["model_version"] = model.version;
      write_json(tr_out, j);
      record.inputs = {{"checkpoint", tr_checkpoint}, {"manifest", tr_manifest}};
      record.config["threshold"] = tr_threshold;
      record.outputs["report"] = tr_out;
      record.result = j;
      out << j.dump(2) << "\n";

    } else if (*gc) {
      record.command = "gradcam";
      record.path = run_record_path(gc_out);
      auto model = load_model(gc_checkpoint);
      ImageTensor image = read_image(gc_image);
      auto probs = trainer::predict(model, image);
      ClassLabel target = trainer::argmax_label(probs).first;
      if (!gc_class.empty()) {
        auto parsed = parse_class(gc_class);
        if (!parsed) throw ValidationError("unknown class '" + gc_class + "'");
        target = *parsed;
      }
      auto heat = explain::gradcam_heatmap(model, image, target);
      write_png(explain::colorize_overlay(heat, preprocess(image), gc_alpha), gc_out);
      record.inputs = {{"checkpoint", gc_checkpoint}, {"image", gc_image}};
      record.config = {{"class", std::string(name_of(target))}, {"alpha", gc_alpha}};
      record.outputs["overlay"] = gc_out;
      if (!gc_csv.empty()) {
        explain::write_heatmap_csv(heat, gc_csv);
        record.outputs["csv"] = gc_csv;
      }
      auto [row, col] = heat.argmax();
      record.result = {{"target", std::string(name_of(target))},
                       {"probability", probs[static_cast<std::size_t>(index_of(target))]},
                       {"peak", {row, col}}};
      out << "Grad-CAM for " << name_of(target) << " written to " << gc_out << "\n";

    } else if (*sv) {
      record.command = "serve";
      record.path = sv_record.empty() ? fs::path("serve.run.json") : fs::path(sv_record);
      service::ServiceConfig sc = service::ServiceConfig::from_config(config);
      if (*sv_threshold_opt) sc.threshold = sv_threshold;
      if (*sv_payload_opt) sc.max_payload_bytes = sv_max_payload;
      if (*sv_reference_opt) sc.reference_dir = sv_reference;
      if (*sv_log_opt) sc.request_log = sv_log;
      service::DiagnosisService svc(sc);
      svc.load_checkpoint(sv_checkpoint);
      service::HttpServer server(svc);
      const int port = server.bind(sv_host, sv_port);
      record.inputs["checkpoint"] = sv_checkpoint;
      record.config = {{"host", sv_host},
                       {"port", port},
                       {"threshold", sc.threshold},
                       {"max_payload_bytes", sc.max_payload_bytes},
                       {"reference_dir", sc.reference_dir.string()},
                       {"request_log", sc.request_log.string()}};
      record.result = {{"model_version", svc.health().model_version}};
      record.write("serving");
      out << "listening on http://" << sv_host << ":" << port << "\n";
      serve_until_signal(server, out);
    }

    record.write("ok");
    return kExitOk;
  } catch (const Error &e) {
    err << "error [" << e.kind() << "]: " << e.what() << "\n";
    try {
      record.write("error", e.what());
    } catch (...) {
    }
    return kExitFailure;
  } catch (const std::exception &e) {
    err << "error: " << e.what() << "\n";
    try {
      record.write("error", e.what());
    } catch (...) {
    }
    return kExitFailure;
  }
}

int run(int argc, const char *const *argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, std::cout, std::cerr);
}

}  // namespace rashdx::cli
