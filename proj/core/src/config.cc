// core/src/config.cc

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

#include "msdgp/config.h"

#include <set>

#include "msdgp/error.h"
#include "msdgp/io_util.h"

namespace msdgp {

using nlohmann::json;

namespace {

void reject_unknown(const json &obj, const std::set<std::string> &allowed,
                    const std::string &where) {
  if (!obj.is_object()) throw InvalidConfig(where + " must be an object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!allowed.count(it.key()))
      throw InvalidConfig("unknown key '" + it.key() + "' in " + where);
  }
}

GeneratorSpec generator_from_json(const json &j) {
  reject_unknown(j, {"n_speakers", "n_clusters", "true_latent_dim",
                     "n_utterances", "frames_per_utterance", "input_dim",
                     "output_dim", "noise_std", "n_test_utterances",
                     "imbalance_budget", "segments_per_utterance",
                     "cluster_spread", "cluster_separation", "speaker_gain"},
                 "data.generator");
  GeneratorSpec s;
  s.n_speakers = j.value("n_speakers", s.n_speakers);
  s.n_clusters = j.value("n_clusters", s.n_clusters);
  s.true_latent_dim = j.value("true_latent_dim", s.true_latent_dim);
  s.n_utterances = j.value("n_utterances", s.n_utterances);
  s.frames_per_utterance = j.value("frames_per_utterance", s.frames_per_utterance);
  s.input_dim = j.value("input_dim", s.input_dim);
  s.output_dim = j.value("output_dim", s.output_dim);
  s.noise_std = j.value("noise_std", s.noise_std);
  s.n_test_utterances = j.value("n_test_utterances", s.n_test_utterances);
  s.imbalance_budget = j.value("imbalance_budget", s.imbalance_budget);
  s.segments_per_utterance = j.value("segments_per_utterance", s.segments_per_utterance);
  s.cluster_spread = j.value("cluster_spread", s.cluster_spread);
  s.cluster_separation = j.value("cluster_separation", s.cluster_separation);
  s.speaker_gain = j.value("speaker_gain", s.speaker_gain);
  s.validate();
  return s;
}

json generator_to_json(const GeneratorSpec &s) {
  return json{{"n_speakers", s.n_speakers},
              {"n_clusters", s.n_clusters},
              {"true_latent_dim", s.true_latent_dim},
              {"n_utterances", s.n_utterances},
              {"frames_per_utterance", s.frames_per_utterance},
              {"input_dim", s.input_dim},
              {"output_dim", s.output_dim},
              {"noise_std", s.noise_std},
              {"n_test_utterances", s.n_test_utterances},
              {"imbalance_budget", s.imbalance_budget},
              {"segments_per_utterance", s.segments_per_utterance},
              {"cluster_spread", s.cluster_spread},
              {"cluster_separation", s.cluster_separation},
              {"speaker_gain", s.speaker_gain}};
}

}  // namespace

DgpArchitecture RunConfig::dgp_architecture(int64_t input_dim, int64_t output_dim,
                                            int64_t n_speakers) const {
  DgpArchitecture arch;
  arch.mode = model_kind == "dgplvm" ? ConditioningMode::kLatent
                                     : ConditioningMode::kSpeakerCode;
  arch.input_dim = input_dim;
  arch.output_dim = output_dim;
  arch.n_hidden = n_hidden;
  arch.width = width;
  arch.m_hidden = m_hidden;
  arch.m_speaker = m_speaker;
  arch.n_speakers = n_speakers;
  arch.latent_dim = model_kind == "dgplvm" ? latent_dim : 0;
  arch.feed_layers = feed_layers;
  return arch;
}

DnnArchitecture RunConfig::dnn_architecture(int64_t input_dim, int64_t output_dim,
                                            int64_t n_speakers) const {
  DnnArchitecture arch;
  arch.input_dim = input_dim;
  arch.output_dim = output_dim;
  arch.n_hidden = n_hidden;
  arch.width = width;
  arch.n_speakers = n_speakers;
  for (int f : feed_layers) arch.feed_points.push_back(f);
  return arch;
}

RunConfig parse_run_config(const json &doc) {
  reject_unknown(doc, {"seed", "data", "model", "train", "eval"}, "config");
  RunConfig cfg;
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned() && !doc["seed"].is_number_integer())
      throw InvalidConfig("seed must be an integer");
    cfg.seed = doc["seed"].get<uint64_t>();
  }
  if (doc.contains("data")) {
    const json &data = doc["data"];
    reject_unknown(data, {"generator", "path", "split"}, "data");
    if (data.contains("generator") && data.contains("path"))
      throw InvalidConfig("data: give either generator or path, not both");
    if (data.contains("generator"))
      cfg.generator = generator_from_json(data["generator"]);
    if (data.contains("path")) cfg.corpus_path = data["path"].get<std::string>();
    if (data.contains("split"))
      cfg.split_kind = split_kind_from_name(data["split"].get<std::string>());
  }
  if (doc.contains("model")) {
    const json &model = doc["model"];
    reject_unknown(model,
                   {"kind", "hidden_layers", "width", "m_hidden", "m_speaker",
                    "latent_dim", "feed_layers"},
                   "model");
    cfg.model_kind = model.value("kind", cfg.model_kind);
    if (cfg.model_kind != "dnn" && cfg.model_kind != "dgp" &&
        cfg.model_kind != "dgplvm")
      throw InvalidConfig("model.kind must be dnn, dgp, or dgplvm");
    cfg.n_hidden = model.value("hidden_layers", cfg.n_hidden);
    cfg.width = model.value("width", cfg.width);
    cfg.m_hidden = model.value("m_hidden", cfg.m_hidden);
    cfg.m_speaker = model.value("m_speaker", cfg.m_speaker);
    cfg.latent_dim = model.value("latent_dim", cfg.latent_dim);
    if (model.contains("feed_layers")) {
      const json &feeds = model["feed_layers"];
      if (feeds.is_string()) {
        if (feeds.get<std::string>() != "all")
          throw InvalidConfig("feed_layers string must be \"all\"");
      } else if (feeds.is_array()) {
        cfg.feed_layers = feeds.get<std::vector<int>>();
      } else {
        throw InvalidConfig("feed_layers must be \"all\" or a list");
      }
    }
  }
  // Schedule defaults by kind.
  cfg.train.epochs = cfg.model_kind == "dnn" ? 100 : 50;
  cfg.train.learning_rate = cfg.model_kind == "dnn" ? 1e-4 : 0.01;
  if (doc.contains("train")) {
    const json &train = doc["train"];
    reject_unknown(train,
                   {"batch_size", "epochs", "learning_rate", "n_samples",
                    "oversample_factor", "beta1", "beta2", "epsilon"},
                   "train");
    cfg.train.batch_size = train.value("batch_size", cfg.train.batch_size);
    cfg.train.epochs = train.value("epochs", cfg.train.epochs);
    cfg.train.learning_rate = train.value("learning_rate", cfg.train.learning_rate);
    cfg.train.n_samples = train.value("n_samples", cfg.train.n_samples);
    cfg.train.oversample_factor =
        train.value("oversample_factor", cfg.train.oversample_factor);
    cfg.train.beta1 = train.value("beta1", cfg.train.beta1);
    cfg.train.beta2 = train.value("beta2", cfg.train.beta2);
    cfg.train.epsilon = train.value("epsilon", cfg.train.epsilon);
  }
  cfg.train.seed = cfg.seed;
  cfg.train.validate();
  if (doc.contains("eval")) {
    const json &ev = doc["eval"];
    reject_unknown(ev, {"mcd", "f0", "dur"}, "eval");
    cfg.eval_mcd = ev.value("mcd", true);
    cfg.eval_f0 = ev.value("f0", true);
    cfg.eval_dur = ev.value("dur", true);
  }

  json resolved;
  resolved["seed"] = cfg.seed;
  json data;
  if (cfg.generator.has_value()) data["generator"] = generator_to_json(*cfg.generator);
  if (cfg.corpus_path.has_value()) data["path"] = *cfg.corpus_path;
  data["split"] = split_kind_name(cfg.split_kind);
  resolved["data"] = data;
  json feeds;
  if (cfg.feed_layers.empty()) {
    feeds = "all";
  } else {
    feeds = cfg.feed_layers;
  }
  resolved["model"] = json{{"kind", cfg.model_kind},
                           {"hidden_layers", cfg.n_hidden},
                           {"width", cfg.width},
                           {"m_hidden", cfg.m_hidden},
                           {"m_speaker", cfg.m_speaker},
                           {"latent_dim", cfg.latent_dim},
                           {"feed_layers", feeds}};
  resolved["train"] = json{{"batch_size", cfg.train.batch_size},
                           {"epochs", cfg.train.epochs},
                           {"learning_rate", cfg.train.learning_rate},
                           {"n_samples", cfg.train.n_samples},
                           {"oversample_factor", cfg.train.oversample_factor},
                           {"beta1", cfg.train.beta1},
                           {"beta2", cfg.train.beta2},
                           {"epsilon", cfg.train.epsilon}};
  resolved["eval"] = json{{"mcd", cfg.eval_mcd}, {"f0", cfg.eval_f0}, {"dur", cfg.eval_dur}};
  cfg.resolved = resolved;
  return cfg;
}

RunConfig load_run_config(const std::string &path) {
  json doc;
  try {
    doc = json::parse(read_file(path));
  } catch (const json::parse_error &e) {
    throw InvalidConfig("cannot parse " + path + ": " + e.what());
  }
  return parse_run_config(doc);
}

}  // namespace msdgp
