// core/include/msdgp/checkpoint.h

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

#ifndef MSDGP_CHECKPOINT_H_
#define MSDGP_CHECKPOINT_H_

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "msdgp/dgp_model.h"
#include "msdgp/dnn_model.h"
#include "msdgp/trainer.h"

namespace msdgp {

nlohmann::json arch_to_json(const DgpArchitecture &arch);
DgpArchitecture arch_from_json(const nlohmann::json &j);
nlohmann::json dnn_arch_to_json(const DnnArchitecture &arch);
DnnArchitecture dnn_arch_from_json(const nlohmann::json &j);

// A trained model of either family plus the resolved configuration it was
// produced under. `config` must contain an "arch" (or "dnn_arch") section;
// everything else (train settings, seed, corpus id) is carried verbatim so
// any artifact is reproducible from its own metadata.
struct AnyModel {
  std::string kind;  // "dnn" | "dgp" | "dgplvm"
  nlohmann::json config;
  std::optional<DgpModel> dgp;
  std::optional<DnnModel> dnn;

  bool is_dgp() const { return dgp.has_value(); }
  std::string id() const;
  Tensor predict(const Tensor &x, const std::vector<int64_t> &speakers) const;
};

AnyModel make_any(DgpModel model, const std::string &kind, nlohmann::json config);
AnyModel make_any(DnnModel model, nlohmann::json config);

// Versioned JSON checkpoint: {format_version, config, params}, parameter
// names sorted lexicographically, floats as shortest round-trip decimals.
// save -> load -> save is byte-identical.
void save_checkpoint(const AnyModel &model, const std::string &path);
AnyModel load_checkpoint(const std::string &path);

}  // namespace msdgp

#endif  // MSDGP_CHECKPOINT_H_
