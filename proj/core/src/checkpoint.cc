// core/src/checkpoint.cc

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

#include "msdgp/checkpoint.h"

#include <map>

#include "msdgp/error.h"
#include "msdgp/io_util.h"

namespace msdgp {

using nlohmann::json;

namespace {
constexpr int kCheckpointFormatVersion = 1;
}  // namespace

json arch_to_json(const DgpArchitecture &arch) {
  return json{{"mode", conditioning_mode_name(arch.mode)},
              {"input_dim", arch.input_dim},
              {"output_dim", arch.output_dim},
              {"hidden_layers", arch.n_hidden},
              {"width", arch.width},
              {"m_hidden", arch.m_hidden},
              {"m_speaker", arch.m_speaker},
              {"n_speakers", arch.n_speakers},
              {"latent_dim", arch.latent_dim},
              {"feed_layers", arch.resolved_feed_layers()},
              // Kernel family is fixed; the order is recorded so checkpoints
              // are self-describing.
              {"kernel", "arccos"},
              {"kernel_order", 1},
              {"mean_fn", "identity_projection_hidden_zero_output"}};
}

DgpArchitecture arch_from_json(const json &j) {
  DgpArchitecture arch;
  arch.mode = conditioning_mode_from_name(j.at("mode").get<std::string>());
  arch.input_dim = j.at("input_dim").get<int64_t>();
  arch.output_dim = j.at("output_dim").get<int64_t>();
  arch.n_hidden = j.at("hidden_layers").get<int>();
  arch.width = j.at("width").get<int64_t>();
  arch.m_hidden = j.at("m_hidden").get<int64_t>();
  arch.m_speaker = j.at("m_speaker").get<int64_t>();
  arch.n_speakers = j.at("n_speakers").get<int64_t>();
  arch.latent_dim = j.at("latent_dim").get<int64_t>();
  arch.feed_layers = j.at("feed_layers").get<std::vector<int>>();
  if (j.at("kernel_order").get<int>() != 1)
    throw InvalidConfig("only kernel_order 1 is supported");
  return arch;
}

json dnn_arch_to_json(const DnnArchitecture &arch) {
  return json{{"input_dim", arch.input_dim},   {"output_dim", arch.output_dim},
              {"hidden_layers", arch.n_hidden}, {"width", arch.width},
              {"n_speakers", arch.n_speakers},  {"feed_points", arch.feed_points},
              {"activation", "relu"}};
}

DnnArchitecture dnn_arch_from_json(const json &j) {
  DnnArchitecture arch;
  arch.input_dim = j.at("input_dim").get<int64_t>();
  arch.output_dim = j.at("output_dim").get<int64_t>();
  arch.n_hidden = j.at("hidden_layers").get<int>();
  arch.width = j.at("width").get<int64_t>();
  arch.n_speakers = j.at("n_speakers").get<int64_t>();
  arch.feed_points = j.at("feed_points").get<std::vector<int>>();
  return arch;
}

std::string AnyModel::id() const {
  return kind + "-" + fnv1a64_hex(config.dump());
}

Tensor AnyModel::predict(const Tensor &x, const std::vector<int64_t> &speakers) const {
  if (dgp.has_value()) return msdgp::predict(*dgp, x, speakers);
  if (dnn.has_value()) return dnn_forward(*dnn, x, speakers);
  throw WrongModelKind("empty AnyModel");
}

AnyModel make_any(DgpModel model, const std::string &kind, json config) {
  AnyModel any;
  any.kind = kind;
  any.config = std::move(config);
  any.dgp = std::move(model);
  return any;
}

AnyModel make_any(DnnModel model, json config) {
  AnyModel any;
  any.kind = "dnn";
  any.config = std::move(config);
  any.dnn = std::move(model);
  return any;
}

void save_checkpoint(const AnyModel &model, const std::string &path) {
  json doc;
  doc["format_version"] = kCheckpointFormatVersion;
  doc["config"] = model.config;
  doc["config"]["kind"] = model.kind;
  json params = json::object();
  std::vector<ParamRef> refs;
  // parameters() only reads the tensors here.
  if (model.dgp.has_value()) {
    refs = parameters(const_cast<DgpModel &>(*model.dgp));
  } else if (model.dnn.has_value()) {
    refs = parameters(const_cast<DnnModel &>(*model.dnn));
  } else {
    throw WrongModelKind("empty AnyModel");
  }
  for (const ParamRef &ref : refs) {
    json shape = json::array();
    for (int64_t d : ref.tensor->shape()) shape.push_back(d);
    json data = json::array();
    for (double v : ref.tensor->data()) data.push_back(v);
    params[ref.name] = json{{"shape", shape}, {"data", data}};
  }
  doc["params"] = params;
  write_file(path, doc.dump(2) + "\n");
}

AnyModel load_checkpoint(const std::string &path) {
  json doc = json::parse(read_file(path));
  if (doc.at("format_version").get<int>() != kCheckpointFormatVersion)
    throw IoError("unsupported checkpoint format version");
  json config = doc.at("config");
  std::string kind = config.at("kind").get<std::string>();
  AnyModel any;
  any.kind = kind;
  any.config = config;
  any.config.erase("kind");

  std::vector<ParamRef> refs;
  RandomStream rng(0, 0);
  if (kind == "dnn") {
    DnnArchitecture arch = dnn_arch_from_json(config.at("arch"));
    any.dnn = init_dnn_model(arch, rng);
    refs = parameters(*any.dnn);
  } else {
    DgpArchitecture arch = arch_from_json(config.at("arch"));
    any.dgp = init_model(arch, rng);
    refs = parameters(*any.dgp);
  }
  const json &params = doc.at("params");
  std::map<std::string, bool> seen;
  for (ParamRef &ref : refs) {
    if (!params.contains(ref.name))
      throw IoError("checkpoint missing parameter " + ref.name);
    const json &entry = params.at(ref.name);
    Shape shape;
    for (const auto &d : entry.at("shape")) shape.push_back(d.get<int64_t>());
    if (!shapes_equal(shape, ref.tensor->shape()))
      throw IoError("checkpoint shape mismatch for " + ref.name);
    std::vector<double> data;
    data.reserve(entry.at("data").size());
    for (const auto &v : entry.at("data")) data.push_back(v.get<double>());
    *ref.tensor = Tensor(shape, std::move(data)).with_requires_grad(true);
    seen[ref.name] = true;
  }
  for (auto it = params.begin(); it != params.end(); ++it) {
    if (!seen.count(it.key()))
      throw IoError("checkpoint has unknown parameter " + it.key());
  }
  if (any.dgp.has_value()) any.dgp->validate();
  if (any.dnn.has_value()) any.dnn->validate();
  return any;
}

}  // namespace msdgp
