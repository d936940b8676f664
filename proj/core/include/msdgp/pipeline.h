// core/include/msdgp/pipeline.h

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

#ifndef MSDGP_PIPELINE_H_
#define MSDGP_PIPELINE_H_

#include <optional>
#include <string>
#include <vector>

#include "msdgp/checkpoint.h"
#include "msdgp/config.h"
#include "msdgp/corpus.h"
#include "msdgp/evaluation.h"

namespace msdgp {

// Command bodies behind the CLI. They throw library errors; the executable
// maps them to exit codes (config/usage 2, divergence 3, other failures 1).

// generate + make_splits + normalize + save. Returns the corpus directory.
std::string run_gen_data(const std::string &config_path, const std::string &out_dir);

// Train the configured model on a corpus directory; writes checkpoint.json
// and trace.csv under out_dir. seed_override, when set, replaces the config
// seed everywhere (including the embedded resolved config).
struct TrainOutput {
  std::string checkpoint_path;
  std::string trace_path;
  AnyModel model;
};
TrainOutput run_train(const std::string &config_path, const std::string &data_dir,
                      const std::string &out_dir,
                      std::optional<uint64_t> seed_override);
// In-memory variant used by protocols.
AnyModel train_from_config(const RunConfig &config, const Corpus &corpus,
                           TrainResult *trace_out = nullptr);

Report run_eval(const std::string &checkpoint_path, const std::string &data_dir,
                const std::string &split, const std::string &report_path);

// Trains one model per feed setting (each single hidden layer, then all)
// and writes report-feed-<tag>.json plus a combined tables.md.
std::vector<std::string> run_ablate_layers(const std::string &config_path,
                                           const std::string &data_dir,
                                           const std::string &out_dir);

std::string run_compare(const std::vector<std::string> &report_paths,
                        const std::string &out_path);

}  // namespace msdgp

#endif  // MSDGP_PIPELINE_H_
