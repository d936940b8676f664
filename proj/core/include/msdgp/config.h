// core/include/msdgp/config.h

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

#ifndef MSDGP_CONFIG_H_
#define MSDGP_CONFIG_H_

#include <optional>
#include <string>

#include "json.hpp"

#include "msdgp/corpus.h"
#include "msdgp/dnn_model.h"
#include "msdgp/trainer.h"

namespace msdgp {

// Parsed run configuration. JSON schema (unknown keys rejected):
//
// {
//   "seed": 42,
//   "data": {"generator": {...GeneratorSpec fields...}, "split": "balanced"}
//           or {"path": "corpus-dir"},
//   "model": {"kind": "dnn|dgp|dgplvm", "hidden_layers": 2, "width": 8,
//             "m_hidden": 32, "m_speaker": 8, "latent_dim": 3,
//             "feed_layers": "all" | [1, 2]},
//   "train": {"batch_size", "epochs", "learning_rate", "n_samples",
//             "oversample_factor", "beta1", "beta2", "epsilon"},
//   "eval": {"mcd": true, "f0": true, "dur": true}
// }
//
// Schedule defaults resolve by model kind: 50 epochs at learning rate 0.01
// for dgp/dgplvm, 100 epochs at 1e-4 for dnn.
struct RunConfig {
  uint64_t seed = 0;
  std::optional<GeneratorSpec> generator;
  SplitKind split_kind = SplitKind::kBalanced;
  std::optional<std::string> corpus_path;
  std::string model_kind = "dgp";
  int n_hidden = 2;
  int64_t width = 8;
  int64_t m_hidden = 32;
  int64_t m_speaker = 8;
  int64_t latent_dim = 3;
  std::vector<int> feed_layers;  // empty => all
  TrainConfig train;
  bool eval_mcd = true, eval_f0 = true, eval_dur = true;
  nlohmann::json resolved;  // full config with defaults filled in

  // Architecture completed with corpus-derived dims.
  DgpArchitecture dgp_architecture(int64_t input_dim, int64_t output_dim,
                                   int64_t n_speakers) const;
  DnnArchitecture dnn_architecture(int64_t input_dim, int64_t output_dim,
                                   int64_t n_speakers) const;
};

RunConfig parse_run_config(const nlohmann::json &doc);
RunConfig load_run_config(const std::string &path);

}  // namespace msdgp

#endif  // MSDGP_CONFIG_H_
