// tools/msdgp_main.cc

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

#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "msdgp/error.h"
#include "msdgp/experiments.h"
#include "msdgp/io_util.h"
#include "msdgp/pipeline.h"

namespace {

int exit_code_for(const std::exception &e) {
  if (dynamic_cast<const msdgp::DivergenceDetected *>(&e) != nullptr) return 3;
  if (dynamic_cast<const msdgp::InvalidConfig *>(&e) != nullptr ||
      dynamic_cast<const msdgp::InvalidSpec *>(&e) != nullptr ||
      dynamic_cast<const msdgp::InsufficientData *>(&e) != nullptr ||
      dynamic_cast<const msdgp::EmptyTrainSplit *>(&e) != nullptr)
    return 2;
  return 1;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Multi-speaker regression with deep Gaussian processes"};
  app.require_subcommand(1);

  std::string config_path, data_dir, out_path, split = "test";
  std::string checkpoint_path, report_path, protocol_name;
  std::vector<std::string> report_paths;
  std::optional<uint64_t> seed_override;
  uint64_t seed_value = 0;

  CLI::App *gen = app.add_subcommand("gen-data", "Generate a synthetic corpus");
  gen->alias("gen_data");
  gen->add_option("--config", config_path, "Run config JSON")->required();
  gen->add_option("--out", out_path, "Output corpus directory")->required();

  CLI::App *train = app.add_subcommand("train", "Train a model on a corpus");
  train->add_option("--config", config_path, "Run config JSON")->required();
  train->add_option("--data", data_dir, "Corpus directory")->required();
  train->add_option("--out", out_path, "Output directory")->required();
  CLI::Option *seed_opt = train->add_option("--seed", seed_value, "Seed override");

  CLI::App *eval = app.add_subcommand("eval", "Evaluate a checkpoint");
  eval->add_option("--model", checkpoint_path, "Checkpoint JSON")->required();
  eval->add_option("--data", data_dir, "Corpus directory")->required();
  eval->add_option("--split", split, "Split name (train|test)");
  eval->add_option("--report", report_path, "Report JSON output")->required();

  CLI::App *ablate =
      app.add_subcommand("ablate-layers", "Sweep the conditioning feed layer");
  ablate->alias("ablate_layers");
  ablate->add_option("--config", config_path, "Run config JSON")->required();
  ablate->add_option("--data", data_dir, "Corpus directory")->required();
  ablate->add_option("--out", out_path, "Output directory")->required();

  CLI::App *compare = app.add_subcommand("compare", "Render a comparison table");
  compare->add_option("--reports", report_paths, "Report JSON files")
      ->required()
      ->expected(-1);
  compare->add_option("--out", out_path, "Markdown output path")->required();

  CLI::App *protocol = app.add_subcommand("protocol", "Run a scripted protocol");
  protocol->add_option("--name", protocol_name,
                       "balanced|imbalanced|dim_sweep|layer_ablation|latent_recovery")
      ->required();
  protocol->add_option("--config", config_path, "Base run config JSON")->required();
  protocol->add_option("--out", out_path, "Bundle directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      msdgp::run_gen_data(config_path, out_path);
      std::printf("corpus written to %s\n", out_path.c_str());
    } else if (train->parsed()) {
      if (seed_opt->count() > 0) seed_override = seed_value;
      msdgp::TrainOutput out =
          msdgp::run_train(config_path, data_dir, out_path, seed_override);
      std::printf("checkpoint: %s\ntrace: %s\n", out.checkpoint_path.c_str(),
                  out.trace_path.c_str());
    } else if (eval->parsed()) {
      msdgp::Report report =
          msdgp::run_eval(checkpoint_path, data_dir, split, report_path);
      std::printf("report: %s (MCD %.3f dB, F0 %.1f cent, DUR %.2f ms)\n",
                  report_path.c_str(), report.aggregate.mcd_db,
                  report.aggregate.f0_rmse_cent, report.aggregate.dur_rmse_ms);
    } else if (ablate->parsed()) {
      auto paths = msdgp::run_ablate_layers(config_path, data_dir, out_path);
      std::printf("%zu ablation reports under %s\n", paths.size(), out_path.c_str());
    } else if (compare->parsed()) {
      msdgp::run_compare(report_paths, out_path);
      std::printf("table written to %s\n", out_path.c_str());
    } else if (protocol->parsed()) {
      nlohmann::json base = nlohmann::json::parse(msdgp::read_file(config_path));
      msdgp::ProtocolResult result =
          msdgp::run_protocol(protocol_name, base, out_path);
      std::printf("bundle: %s (%zu reports)\n", result.bundle_dir.c_str(),
                  result.report_paths.size());
    }
  } catch (const std::exception &e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_code_for(e);
  }
  return 0;
}
