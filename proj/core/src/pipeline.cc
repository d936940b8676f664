// core/src/pipeline.cc

// Copyright 2026  msdgp authors

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

#include "msdgp/pipeline.h"

#include <filesystem>

#include "msdgp/error.h"
#include "msdgp/io_util.h"
#include "msdgp/log.h"

namespace msdgp {

using nlohmann::json;

namespace {

// Stream id for model initialization draws.
constexpr uint64_t kStreamModelInit = 21;

Corpus load_corpus_checked(const std::string &data_dir) {
  if (!std::filesystem::exists(data_dir + "/meta.json"))
    throw InvalidConfig("no corpus at " + data_dir);
  return load_corpus(data_dir);
}

}  // namespace

std::string run_gen_data(const std::string &config_path, const std::string &out_dir) {
  RunConfig cfg = load_run_config(config_path);
  if (!cfg.generator.has_value())
    throw InvalidSpec("gen-data needs data.generator in the config");
  Corpus corpus = generate(*cfg.generator, cfg.seed);
  make_splits(corpus, cfg.split_kind);
  normalize(corpus);
  save_corpus(corpus, out_dir);
  MSDGP_INFO("wrote corpus " << corpus.id << " to " << out_dir);
  return out_dir;
}

AnyModel train_from_config(const RunConfig &config, const Corpus &corpus,
                           TrainResult *trace_out) {
  int64_t input_dim = corpus.model_input_dim();
  int64_t output_dim = corpus.spec.output_dim;
  int64_t n_speakers = corpus.spec.n_speakers;
  json model_config;
  model_config["run"] = config.resolved;
  model_config["corpus_id"] = corpus.id;
  model_config["seed"] = config.seed;
  RandomStream init_rng(config.seed, kStreamModelInit);
  TrainResult trace;
  AnyModel any;
  if (config.model_kind == "dnn") {
    DnnArchitecture arch = config.dnn_architecture(input_dim, output_dim, n_speakers);
    DnnModel model = init_dnn_model(arch, init_rng);
    trace = dnn_train(model, corpus, config.train);
    model_config["arch"] = dnn_arch_to_json(arch);
    any = make_any(std::move(model), model_config);
  } else {
    DgpArchitecture arch = config.dgp_architecture(input_dim, output_dim, n_speakers);
    DgpModel model = init_model(arch, init_rng);
    trace = train(model, corpus, config.train);
    model_config["arch"] = arch_to_json(arch);
    any = make_any(std::move(model), config.model_kind, model_config);
  }
  if (trace_out != nullptr) *trace_out = std::move(trace);
  return any;
}

TrainOutput run_train(const std::string &config_path, const std::string &data_dir,
                      const std::string &out_dir,
                      std::optional<uint64_t> seed_override) {
  RunConfig cfg = load_run_config(config_path);
  if (seed_override.has_value()) {
    cfg.seed = *seed_override;
    cfg.train.seed = *seed_override;
    cfg.resolved["seed"] = *seed_override;
  }
  Corpus corpus = load_corpus_checked(data_dir);
  std::filesystem::create_directories(out_dir);
  TrainOutput out;
  TrainResult trace;
  out.model = train_from_config(cfg, corpus, &trace);
  out.checkpoint_path = out_dir + "/checkpoint.json";
  out.trace_path = out_dir + "/trace.csv";
  save_checkpoint(out.model, out.checkpoint_path);
  write_file(out.trace_path, trace_to_csv(trace));
  MSDGP_INFO("wrote checkpoint " << out.model.id() << " to " << out.checkpoint_path);
  return out;
}

Report run_eval(const std::string &checkpoint_path, const std::string &data_dir,
                const std::string &split, const std::string &report_path) {
  if (!std::filesystem::exists(checkpoint_path))
    throw InvalidConfig("no checkpoint at " + checkpoint_path);
  AnyModel model = load_checkpoint(checkpoint_path);
  Corpus corpus = load_corpus_checked(data_dir);
  Report report = evaluate_model(model, corpus, split);
  if (!report_path.empty()) save_report(report, report_path);
  return report;
}

std::vector<std::string> run_ablate_layers(const std::string &config_path,
                                           const std::string &data_dir,
                                           const std::string &out_dir) {
  RunConfig cfg = load_run_config(config_path);
  if (cfg.model_kind == "dnn")
    throw InvalidConfig("ablate-layers applies to dgp/dgplvm models");
  Corpus corpus = load_corpus_checked(data_dir);
  std::filesystem::create_directories(out_dir);
  std::vector<std::pair<std::string, std::vector<int>>> settings;
  for (int l = 1; l <= cfg.n_hidden; ++l)
    settings.push_back({std::to_string(l), {l}});
  std::vector<int> all;
  for (int l = 1; l <= cfg.n_hidden; ++l) all.push_back(l);
  settings.push_back({"all", all});

  std::vector<std::string> paths;
  std::vector<Report> reports;
  for (const auto &[tag, feeds] : settings) {
    RunConfig variant = cfg;
    variant.feed_layers = feeds;
    variant.resolved["model"]["feed_layers"] =
        tag == "all" ? json("all") : json(feeds);
    AnyModel model = train_from_config(variant, corpus);
    Report report = evaluate_model(model, corpus, "test");
    report.label = cfg.model_kind + "[feed=" + tag + "]";
    std::string path = out_dir + "/report-feed-" + tag + ".json";
    save_report(report, path);
    paths.push_back(path);
    reports.push_back(std::move(report));
    MSDGP_INFO("ablation feed=" << tag << " done");
  }
  write_file(out_dir + "/tables.md", render_table(reports));
  return paths;
}

std::string run_compare(const std::vector<std::string> &report_paths,
                        const std::string &out_path) {
  if (report_paths.empty()) throw InvalidConfig("compare needs reports");
  std::vector<Report> reports;
  for (const std::string &path : report_paths) {
    if (!std::filesystem::exists(path))
      throw InvalidConfig("no report at " + path);
    reports.push_back(load_report(path));
  }
  std::string table = render_table(reports);
  write_file(out_path, table);
  return table;
}

}  // namespace msdgp
