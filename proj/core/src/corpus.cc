// core/src/corpus.cc

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

#include "msdgp/corpus.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <sstream>

#include "json.hpp"

#include "msdgp/error.h"
#include "msdgp/io_util.h"
#include "msdgp/rng.h"
#include "msdgp/tensor_ops.h"

namespace msdgp {

namespace {

using nlohmann::json;

constexpr int kMetaFormatVersion = 1;

// Stream ids for the generator's independent draw families.
constexpr uint64_t kStreamEmbeddings = 11;
constexpr uint64_t kStreamFunction = 12;
constexpr uint64_t kStreamUtterance = 13;
constexpr uint64_t kStreamNoise = 14;

double sigmoid(double v) { return 1.0 / (1.0 + std::exp(-v)); }

// Fixed random two-layer network y = W2 tanh(W1 u + b1) + b2 drawn once per
// corpus; u = [x, pos, e_k].
struct TargetFunction {
  Tensor w1, b1, w2, b2, speaker_map;
  int64_t hidden = 16;

  static TargetFunction draw(const GeneratorSpec &spec, RandomStream &rng) {
    TargetFunction f;
    int64_t u_dim = spec.input_dim + 4 + spec.true_latent_dim;
    double s1 = 1.0 / std::sqrt(static_cast<double>(u_dim));
    double s2 = 1.0 / std::sqrt(static_cast<double>(f.hidden));
    f.w1 = ops::scale(gaussian_sample({u_dim, f.hidden}, rng), s1);
    f.b1 = ops::scale(gaussian_sample({f.hidden}, rng), 0.3);
    f.w2 = ops::scale(gaussian_sample({f.hidden, spec.output_dim}, rng), s2);
    f.b2 = ops::scale(gaussian_sample({spec.output_dim}, rng), 0.3);
    f.speaker_map = ops::scale(
        gaussian_sample({spec.true_latent_dim, spec.output_dim}, rng),
        spec.speaker_gain / std::sqrt(static_cast<double>(spec.true_latent_dim)));
    return f;
  }

  // One frame's raw targets before the output-dimension conventions; the
  // embedding enters both through the hidden layer and an additive map so
  // speaker identity is strongly expressed.
  std::vector<double> eval(const std::vector<double> &u,
                           const std::vector<double> &e) const {
    std::vector<double> h(static_cast<size_t>(hidden), 0.0);
    auto w1d = w1.data();
    for (int64_t j = 0; j < hidden; ++j) {
      double acc = b1[j];
      for (size_t i = 0; i < u.size(); ++i)
        acc += u[i] * w1d[static_cast<int64_t>(i) * hidden + j];
      for (size_t qi = 0; qi < e.size(); ++qi)
        acc += e[qi] * w1d[static_cast<int64_t>(u.size() + qi) * hidden + j];
      h[static_cast<size_t>(j)] = std::tanh(acc);
    }
    int64_t d_y = w2.dim(1);
    std::vector<double> out(static_cast<size_t>(d_y), 0.0);
    auto w2d = w2.data();
    auto smd = speaker_map.data();
    for (int64_t d = 0; d < d_y; ++d) {
      double acc = b2[d];
      for (int64_t j = 0; j < hidden; ++j) acc += h[static_cast<size_t>(j)] * w2d[j * d_y + d];
      for (size_t q = 0; q < e.size(); ++q) acc += e[q] * smd[static_cast<int64_t>(q) * d_y + d];
      out[static_cast<size_t>(d)] = acc;
    }
    return out;
  }
};

json tensor_to_json(const Tensor &t) {
  json shape = json::array();
  for (int64_t d : t.shape()) shape.push_back(d);
  json data = json::array();
  for (double v : t.data()) data.push_back(v);
  return json{{"shape", shape}, {"data", data}};
}

Tensor tensor_from_json(const json &j) {
  Shape shape;
  for (const auto &d : j.at("shape")) shape.push_back(d.get<int64_t>());
  std::vector<double> data;
  for (const auto &v : j.at("data")) data.push_back(v.get<double>());
  return Tensor(std::move(shape), std::move(data));
}

}  // namespace

void GeneratorSpec::validate() const {
  if (n_speakers < 1 || n_clusters < 1 || n_clusters > n_speakers)
    throw InvalidSpec("speaker/cluster counts");
  if (true_latent_dim < 1 || input_dim < 1 || output_dim < 3)
    throw InvalidSpec("dims (output_dim must be >= 3 for the metric mapping)");
  if (n_utterances < 1 || frames_per_utterance < 1)
    throw InvalidSpec("utterance geometry");
  if (noise_std < 0.0) throw InvalidSpec("negative noise_std");
  if (n_test_utterances < 0 || n_test_utterances >= n_utterances)
    throw InvalidSpec("n_test_utterances must leave training utterances");
  if (imbalance_budget < 1) throw InvalidSpec("imbalance_budget >= 1");
  if (segments_per_utterance < 1 || segments_per_utterance > frames_per_utterance)
    throw InvalidSpec("segments_per_utterance");
}

std::string split_kind_name(SplitKind kind) {
  switch (kind) {
    case SplitKind::kNone: return "none";
    case SplitKind::kBalanced: return "balanced";
    case SplitKind::kImbalanced: return "imbalanced";
  }
  return "none";
}

SplitKind split_kind_from_name(const std::string &name) {
  if (name == "none") return SplitKind::kNone;
  if (name == "balanced") return SplitKind::kBalanced;
  if (name == "imbalanced") return SplitKind::kImbalanced;
  throw InvalidSpec("unknown split kind '" + name + "'");
}

bool Corpus::is_target(int64_t speaker) const {
  return std::find(targets.begin(), targets.end(), speaker) != targets.end();
}

Corpus generate(const GeneratorSpec &spec, uint64_t seed) {
  spec.validate();
  Corpus corpus;
  corpus.spec = spec;
  corpus.seed = seed;

  // True embeddings: cluster centers sit on scaled coordinate axes with
  // alternating signs, so groups are well separated for every seed.
  RandomStream emb_rng(seed, kStreamEmbeddings);
  int64_t q = spec.true_latent_dim;
  std::vector<std::vector<double>> centers;
  for (int64_t g = 0; g < spec.n_clusters; ++g) {
    std::vector<double> c(static_cast<size_t>(q), 0.0);
    int64_t axis = g % q;
    double sign = (g / q) % 2 == 0 ? 1.0 : -1.0;
    double radius = 0.5 * spec.cluster_separation * (1.0 + static_cast<double>(g / (2 * q)));
    c[static_cast<size_t>(axis)] = sign * radius * ((g % (2 * q)) < q ? 1.0 : -1.0);
    centers.push_back(std::move(c));
  }
  std::vector<double> emb(static_cast<size_t>(spec.n_speakers * q));
  corpus.cluster_of.resize(static_cast<size_t>(spec.n_speakers));
  for (int64_t k = 0; k < spec.n_speakers; ++k) {
    int64_t g = k * spec.n_clusters / spec.n_speakers;  // contiguous blocks
    corpus.cluster_of[static_cast<size_t>(k)] = g;
    for (int64_t d = 0; d < q; ++d)
      emb[static_cast<size_t>(k * q + d)] =
          centers[static_cast<size_t>(g)][static_cast<size_t>(d)] +
          spec.cluster_spread * emb_rng.next_normal();
  }
  corpus.true_embeddings = Tensor({spec.n_speakers, q}, std::move(emb));

  // Target roles: the embedded-central and embedded-peripheral speaker of
  // each cluster, by distance to the cluster's own centroid.
  for (int64_t g = 0; g < spec.n_clusters; ++g) {
    std::vector<int64_t> members;
    for (int64_t k = 0; k < spec.n_speakers; ++k)
      if (corpus.cluster_of[static_cast<size_t>(k)] == g) members.push_back(k);
    if (members.size() < 2) continue;
    std::vector<double> centroid(static_cast<size_t>(q), 0.0);
    for (int64_t k : members)
      for (int64_t d = 0; d < q; ++d)
        centroid[static_cast<size_t>(d)] += corpus.true_embeddings.at({k, d});
    for (double &v : centroid) v /= static_cast<double>(members.size());
    auto dist = [&](int64_t k) {
      double s = 0.0;
      for (int64_t d = 0; d < q; ++d) {
        double diff = corpus.true_embeddings.at({k, d}) - centroid[static_cast<size_t>(d)];
        s += diff * diff;
      }
      return s;
    };
    int64_t central = members[0], peripheral = members[0];
    for (int64_t k : members) {
      if (dist(k) < dist(central)) central = k;
      if (dist(k) > dist(peripheral)) peripheral = k;
    }
    corpus.targets.push_back(central);
    corpus.target_roles.push_back("central");
    corpus.targets.push_back(peripheral);
    corpus.target_roles.push_back("peripheral");
  }

  RandomStream fn_rng(seed, kStreamFunction);
  TargetFunction fn = TargetFunction::draw(spec, fn_rng);
  RandomStream noise_rng(seed, kStreamNoise);

  int64_t frames_total =
      spec.n_speakers * spec.n_utterances * spec.frames_per_utterance;
  std::vector<double> pos_data, x_data, y_data;
  pos_data.reserve(static_cast<size_t>(frames_total * 4));
  x_data.reserve(static_cast<size_t>(frames_total * spec.input_dim));
  y_data.reserve(static_cast<size_t>(frames_total * spec.output_dim));
  corpus.speaker_id.reserve(static_cast<size_t>(frames_total));
  corpus.utterance_id.reserve(static_cast<size_t>(frames_total));

  int64_t seg_len = (spec.frames_per_utterance + spec.segments_per_utterance - 1) /
                    spec.segments_per_utterance;
  int64_t f0_dim = spec.output_dim - 2;
  int64_t voiced_dim = spec.output_dim - 1;

  for (int64_t k = 0; k < spec.n_speakers; ++k) {
    std::vector<double> e(static_cast<size_t>(q));
    for (int64_t d = 0; d < q; ++d) e[static_cast<size_t>(d)] = corpus.true_embeddings.at({k, d});
    for (int64_t u = 0; u < spec.n_utterances; ++u) {
      int64_t utt = k * spec.n_utterances + u;
      // Smooth per-utterance input trajectories: three harmonics per dim.
      RandomStream utt_rng = RandomStream(seed, kStreamUtterance).split(static_cast<uint64_t>(utt));
      std::vector<double> amp(static_cast<size_t>(spec.input_dim * 3));
      std::vector<double> phase(static_cast<size_t>(spec.input_dim * 3));
      for (size_t i = 0; i < amp.size(); ++i) {
        amp[i] = utt_rng.next_normal();
        phase[i] = 2.0 * M_PI * utt_rng.next_double();
      }
      for (int64_t t = 0; t < spec.frames_per_utterance; ++t) {
        double rel = spec.frames_per_utterance == 1
                         ? 0.0
                         : static_cast<double>(t) /
                               static_cast<double>(spec.frames_per_utterance - 1);
        int64_t seg_index = t / seg_len;
        int64_t seg_start = seg_index * seg_len;
        int64_t seg_end = std::min(seg_start + seg_len, spec.frames_per_utterance);
        double seg_rel = seg_end - seg_start <= 1
                             ? 0.0
                             : static_cast<double>(t - seg_start) /
                                   static_cast<double>(seg_end - seg_start - 1);
        std::vector<double> u_vec;
        u_vec.reserve(static_cast<size_t>(spec.input_dim + 4 + q));
        for (int64_t d = 0; d < spec.input_dim; ++d) {
          double v = 0.0;
          for (int h = 0; h < 3; ++h)
            v += amp[static_cast<size_t>(d * 3 + h)] / (1.0 + h) *
                 std::sin(2.0 * M_PI * (h + 1) * rel + phase[static_cast<size_t>(d * 3 + h)]);
          u_vec.push_back(v);
        }
        double p[4] = {rel, 1.0 - rel, seg_rel, 1.0 - seg_rel};
        for (double v : p) u_vec.push_back(v);
        std::vector<double> x_frame(u_vec.begin(), u_vec.begin() + spec.input_dim);
        std::vector<double> raw = fn.eval(u_vec, e);
        // Output conventions: dim D_y-2 is log-f0 near log(200 Hz), dim
        // D_y-1 a voicing score in (0,1); earlier dims stay generic.
        raw[static_cast<size_t>(f0_dim)] = 5.3 + 0.25 * raw[static_cast<size_t>(f0_dim)];
        raw[static_cast<size_t>(voiced_dim)] = sigmoid(3.0 * raw[static_cast<size_t>(voiced_dim)]);
        for (int64_t d = 0; d < spec.output_dim; ++d)
          raw[static_cast<size_t>(d)] += spec.noise_std * noise_rng.next_normal();
        corpus.speaker_id.push_back(k);
        corpus.utterance_id.push_back(utt);
        pos_data.insert(pos_data.end(), p, p + 4);
        x_data.insert(x_data.end(), x_frame.begin(), x_frame.end());
        y_data.insert(y_data.end(), raw.begin(), raw.end());
      }
    }
  }
  corpus.pos = Tensor({frames_total, 4}, std::move(pos_data));
  corpus.x = Tensor({frames_total, spec.input_dim}, std::move(x_data));
  corpus.y = Tensor({frames_total, spec.output_dim}, std::move(y_data));

  json id_src = {{"seed", seed},
                 {"n_speakers", spec.n_speakers},
                 {"n_clusters", spec.n_clusters},
                 {"true_latent_dim", spec.true_latent_dim},
                 {"n_utterances", spec.n_utterances},
                 {"frames_per_utterance", spec.frames_per_utterance},
                 {"input_dim", spec.input_dim},
                 {"output_dim", spec.output_dim},
                 {"noise_std", spec.noise_std}};
  corpus.id = "corpus-" + fnv1a64_hex(id_src.dump());
  return corpus;
}

void make_splits(Corpus &corpus, SplitKind kind) {
  const GeneratorSpec &spec = corpus.spec;
  corpus.split.clear();
  corpus.split_kind = kind;
  if (kind == SplitKind::kNone) return;
  int64_t train_per_speaker = spec.n_utterances - spec.n_test_utterances;
  if (train_per_speaker < 1)
    throw InsufficientData("no training utterances left per speaker");
  if (kind == SplitKind::kImbalanced &&
      spec.imbalance_budget > train_per_speaker)
    throw InsufficientData("imbalance budget " +
                           std::to_string(spec.imbalance_budget) +
                           " exceeds available " +
                           std::to_string(train_per_speaker));
  for (int64_t k = 0; k < spec.n_speakers; ++k) {
    bool target = corpus.is_target(k);
    for (int64_t u = 0; u < spec.n_utterances; ++u) {
      int64_t utt = k * spec.n_utterances + u;
      bool held_out = u >= train_per_speaker;
      if (kind == SplitKind::kBalanced) {
        corpus.split[utt] = held_out ? "test" : "train";
      } else {
        if (target) {
          if (held_out) {
            corpus.split[utt] = "test";
          } else if (u < spec.imbalance_budget) {
            corpus.split[utt] = "train";
          }
          // remaining target utterances are withheld entirely
        } else if (!held_out) {
          corpus.split[utt] = "train";
        }
      }
    }
  }
}

void normalize(Corpus &corpus) {
  if (corpus.normalized) throw InvalidSpec("corpus already normalized");
  if (corpus.split_kind == SplitKind::kNone)
    throw EmptyTrainSplit("make_splits must run before normalize");
  int64_t n = corpus.n_frames();
  int64_t d_in = corpus.model_input_dim();
  int64_t d_x = corpus.spec.input_dim;
  int64_t d_y = corpus.spec.output_dim;
  std::vector<int64_t> train_rows;
  for (int64_t i = 0; i < n; ++i) {
    auto it = corpus.split.find(corpus.utterance_id[static_cast<size_t>(i)]);
    if (it != corpus.split.end() && it->second == "train") train_rows.push_back(i);
  }
  if (train_rows.empty()) throw EmptyTrainSplit("train split has no frames");

  NormStats stats;
  stats.input_min.assign(static_cast<size_t>(d_in), std::numeric_limits<double>::infinity());
  stats.input_max.assign(static_cast<size_t>(d_in), -std::numeric_limits<double>::infinity());
  stats.output_mean.assign(static_cast<size_t>(d_y), 0.0);
  stats.output_std.assign(static_cast<size_t>(d_y), 0.0);
  auto input_at = [&](int64_t row, int64_t dim) {
    return dim < d_x ? corpus.x.at({row, dim}) : corpus.pos.at({row, dim - d_x});
  };
  for (int64_t row : train_rows) {
    for (int64_t d = 0; d < d_in; ++d) {
      double v = input_at(row, d);
      stats.input_min[static_cast<size_t>(d)] = std::min(stats.input_min[static_cast<size_t>(d)], v);
      stats.input_max[static_cast<size_t>(d)] = std::max(stats.input_max[static_cast<size_t>(d)], v);
    }
    for (int64_t d = 0; d < d_y; ++d)
      stats.output_mean[static_cast<size_t>(d)] += corpus.y.at({row, d});
  }
  double inv_n = 1.0 / static_cast<double>(train_rows.size());
  for (double &m : stats.output_mean) m *= inv_n;
  for (int64_t row : train_rows) {
    for (int64_t d = 0; d < d_y; ++d) {
      double diff = corpus.y.at({row, d}) - stats.output_mean[static_cast<size_t>(d)];
      stats.output_std[static_cast<size_t>(d)] += diff * diff;
    }
  }
  for (double &s : stats.output_std) s = std::max(std::sqrt(s * inv_n), 1e-8);

  auto map_input = [&](double v, int64_t d) {
    double lo = stats.input_min[static_cast<size_t>(d)], hi = stats.input_max[static_cast<size_t>(d)];
    if (hi - lo <= 0.0) return 0.5;
    return 0.01 + 0.98 * (v - lo) / (hi - lo);
  };
  std::vector<double> new_x(static_cast<size_t>(n * d_x));
  std::vector<double> new_pos(static_cast<size_t>(n * 4));
  std::vector<double> new_y(static_cast<size_t>(n * d_y));
  for (int64_t i = 0; i < n; ++i) {
    for (int64_t d = 0; d < d_x; ++d)
      new_x[static_cast<size_t>(i * d_x + d)] = map_input(corpus.x.at({i, d}), d);
    for (int64_t d = 0; d < 4; ++d)
      new_pos[static_cast<size_t>(i * 4 + d)] = map_input(corpus.pos.at({i, d}), d_x + d);
    for (int64_t d = 0; d < d_y; ++d)
      new_y[static_cast<size_t>(i * d_y + d)] =
          (corpus.y.at({i, d}) - stats.output_mean[static_cast<size_t>(d)]) /
          stats.output_std[static_cast<size_t>(d)];
  }
  corpus.x = Tensor({n, d_x}, std::move(new_x));
  corpus.pos = Tensor({n, 4}, std::move(new_pos));
  corpus.y = Tensor({n, d_y}, std::move(new_y));
  corpus.norm_stats = std::move(stats);
  corpus.normalized = true;
}

Tensor denormalize_outputs(const Corpus &corpus, const Tensor &y_normalized) {
  if (!corpus.normalized) throw InvalidSpec("corpus is not normalized");
  int64_t d_y = corpus.spec.output_dim;
  if (y_normalized.rank() != 2 || y_normalized.dim(1) != d_y)
    throw ShapeMismatch("denormalize_outputs shape");
  std::vector<double> out(y_normalized.data().begin(), y_normalized.data().end());
  int64_t n = y_normalized.dim(0);
  for (int64_t i = 0; i < n; ++i)
    for (int64_t d = 0; d < d_y; ++d)
      out[static_cast<size_t>(i * d_y + d)] =
          out[static_cast<size_t>(i * d_y + d)] * corpus.norm_stats.output_std[static_cast<size_t>(d)] +
          corpus.norm_stats.output_mean[static_cast<size_t>(d)];
  return Tensor({n, d_y}, std::move(out));
}

FrameDataset split_dataset(const Corpus &corpus, const std::string &split_name) {
  int64_t n = corpus.n_frames();
  std::vector<int64_t> rows;
  for (int64_t i = 0; i < n; ++i) {
    auto it = corpus.split.find(corpus.utterance_id[static_cast<size_t>(i)]);
    if (it != corpus.split.end() && it->second == split_name) rows.push_back(i);
  }
  FrameDataset ds;
  ds.x = ops::concat({ops::take_rows(corpus.x, rows), ops::take_rows(corpus.pos, rows)}, 1);
  ds.y = ops::take_rows(corpus.y, rows);
  for (int64_t r : rows) {
    ds.speakers.push_back(corpus.speaker_id[static_cast<size_t>(r)]);
    ds.utterances.push_back(corpus.utterance_id[static_cast<size_t>(r)]);
  }
  return ds;
}

namespace {

json spec_to_json(const GeneratorSpec &s) {
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

GeneratorSpec spec_from_json(const json &j) {
  GeneratorSpec s;
  s.n_speakers = j.at("n_speakers").get<int64_t>();
  s.n_clusters = j.at("n_clusters").get<int64_t>();
  s.true_latent_dim = j.at("true_latent_dim").get<int64_t>();
  s.n_utterances = j.at("n_utterances").get<int64_t>();
  s.frames_per_utterance = j.at("frames_per_utterance").get<int64_t>();
  s.input_dim = j.at("input_dim").get<int64_t>();
  s.output_dim = j.at("output_dim").get<int64_t>();
  s.noise_std = j.at("noise_std").get<double>();
  s.n_test_utterances = j.at("n_test_utterances").get<int64_t>();
  s.imbalance_budget = j.at("imbalance_budget").get<int64_t>();
  s.segments_per_utterance = j.at("segments_per_utterance").get<int64_t>();
  s.cluster_spread = j.at("cluster_spread").get<double>();
  s.cluster_separation = j.at("cluster_separation").get<double>();
  s.speaker_gain = j.at("speaker_gain").get<double>();
  return s;
}

}  // namespace

void save_corpus(const Corpus &corpus, const std::string &dir) {
  std::filesystem::create_directories(dir);
  json meta;
  meta["format_version"] = kMetaFormatVersion;
  meta["id"] = corpus.id;
  meta["seed"] = corpus.seed;
  meta["spec"] = spec_to_json(corpus.spec);
  meta["split_kind"] = split_kind_name(corpus.split_kind);
  json splits = json::object();
  for (const auto &[utt, name] : corpus.split) splits[std::to_string(utt)] = name;
  meta["splits"] = splits;
  meta["normalized"] = corpus.normalized;
  if (corpus.normalized) {
    meta["norm_stats"] = json{{"input_min", corpus.norm_stats.input_min},
                              {"input_max", corpus.norm_stats.input_max},
                              {"output_mean", corpus.norm_stats.output_mean},
                              {"output_std", corpus.norm_stats.output_std}};
  }
  meta["true_embeddings"] = tensor_to_json(corpus.true_embeddings);
  meta["cluster_of"] = corpus.cluster_of;
  meta["targets"] = corpus.targets;
  meta["target_roles"] = corpus.target_roles;
  write_file(dir + "/meta.json", meta.dump(2) + "\n");

  std::ostringstream csv;
  csv << "speaker_id,utterance_id";
  for (int d = 0; d < 4; ++d) csv << ",pos" << d;
  for (int64_t d = 0; d < corpus.spec.input_dim; ++d) csv << ",x" << d;
  for (int64_t d = 0; d < corpus.spec.output_dim; ++d) csv << ",y" << d;
  csv << "\n";
  int64_t n = corpus.n_frames();
  for (int64_t i = 0; i < n; ++i) {
    csv << corpus.speaker_id[static_cast<size_t>(i)] << ","
        << corpus.utterance_id[static_cast<size_t>(i)];
    for (int64_t d = 0; d < 4; ++d) csv << "," << format_double(corpus.pos.at({i, d}));
    for (int64_t d = 0; d < corpus.spec.input_dim; ++d)
      csv << "," << format_double(corpus.x.at({i, d}));
    for (int64_t d = 0; d < corpus.spec.output_dim; ++d)
      csv << "," << format_double(corpus.y.at({i, d}));
    csv << "\n";
  }
  write_file(dir + "/frames.csv", csv.str());
}

Corpus load_corpus(const std::string &dir) {
  json meta = json::parse(read_file(dir + "/meta.json"));
  if (meta.at("format_version").get<int>() != kMetaFormatVersion)
    throw IoError("unsupported corpus format version");
  Corpus corpus;
  corpus.spec = spec_from_json(meta.at("spec"));
  corpus.seed = meta.at("seed").get<uint64_t>();
  corpus.id = meta.at("id").get<std::string>();
  corpus.split_kind = split_kind_from_name(meta.at("split_kind").get<std::string>());
  for (auto it = meta.at("splits").begin(); it != meta.at("splits").end(); ++it)
    corpus.split[std::stoll(it.key())] = it.value().get<std::string>();
  corpus.normalized = meta.at("normalized").get<bool>();
  if (corpus.normalized) {
    const json &ns = meta.at("norm_stats");
    corpus.norm_stats.input_min = ns.at("input_min").get<std::vector<double>>();
    corpus.norm_stats.input_max = ns.at("input_max").get<std::vector<double>>();
    corpus.norm_stats.output_mean = ns.at("output_mean").get<std::vector<double>>();
    corpus.norm_stats.output_std = ns.at("output_std").get<std::vector<double>>();
  }
  corpus.true_embeddings = tensor_from_json(meta.at("true_embeddings"));
  corpus.cluster_of = meta.at("cluster_of").get<std::vector<int64_t>>();
  corpus.targets = meta.at("targets").get<std::vector<int64_t>>();
  corpus.target_roles = meta.at("target_roles").get<std::vector<std::string>>();

  std::string csv = read_file(dir + "/frames.csv");
  std::istringstream lines(csv);
  std::string line;
  if (!std::getline(lines, line)) throw IoError("frames.csv is empty");
  int64_t d_x = corpus.spec.input_dim, d_y = corpus.spec.output_dim;
  std::vector<double> pos_data, x_data, y_data;
  while (std::getline(lines, line)) {
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string field;
    auto next = [&]() {
      if (!std::getline(fields, field, ',')) throw IoError("short row in frames.csv");
      return field;
    };
    corpus.speaker_id.push_back(std::stoll(next()));
    corpus.utterance_id.push_back(std::stoll(next()));
    for (int64_t d = 0; d < 4; ++d) pos_data.push_back(parse_double(next()));
    for (int64_t d = 0; d < d_x; ++d) x_data.push_back(parse_double(next()));
    for (int64_t d = 0; d < d_y; ++d) y_data.push_back(parse_double(next()));
  }
  int64_t n = static_cast<int64_t>(corpus.speaker_id.size());
  corpus.pos = Tensor({n, 4}, std::move(pos_data));
  corpus.x = Tensor({n, d_x}, std::move(x_data));
  corpus.y = Tensor({n, d_y}, std::move(y_data));
  return corpus;
}

}  // namespace msdgp
