// core/include/msdgp/experiments.h

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

#ifndef MSDGP_EXPERIMENTS_H_
#define MSDGP_EXPERIMENTS_H_

#include <string>
#include <vector>

#include "json.hpp"

#include "msdgp/config.h"
#include "msdgp/tensor.h"

namespace msdgp {

// Lloyd k-means with seeded restarts; returns per-row labels in [0, k).
std::vector<int64_t> kmeans(const Tensor &points, int64_t k, uint64_t seed,
                            int restarts = 20);
// Best-relabeling agreement between two 2-way labelings, in [0, 1].
double cluster_agreement2(const std::vector<int64_t> &a,
                          const std::vector<int64_t> &b);

// Scripted protocols over a base run config (its data/train sections apply
// to every setting; model settings are overridden per protocol):
//   balanced        DNN vs DGP vs DGPLVM on the balanced split
//   imbalanced      same on the imbalanced split (5-utterance targets,
//                   oversampled), plus the target-speaker RMSE comparison
//   dim_sweep       DGPLVM with latent dim in {2, 3, 16, 64}, both splits
//   layer_ablation  DGP and DGPLVM fed at each single hidden layer and all
//   latent_recovery DGPLVM (latent dim 2) cluster recovery against the
//                   generator's true groups
//
// The bundle directory holds one report JSON per setting, tables.md, and
// provenance.json; the merge order is deterministic (settings sorted by
// name).
struct ProtocolResult {
  std::string bundle_dir;
  std::vector<std::string> report_paths;
  nlohmann::json summary;
};

ProtocolResult run_protocol(const std::string &name,
                            const nlohmann::json &base_config,
                            const std::string &out_dir);

}  // namespace msdgp

#endif  // MSDGP_EXPERIMENTS_H_
