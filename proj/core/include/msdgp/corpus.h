// core/include/msdgp/corpus.h

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

#ifndef MSDGP_CORPUS_H_
#define MSDGP_CORPUS_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "msdgp/tensor.h"

namespace msdgp {

// Synthetic multi-speaker corpus generator. K speakers carry true latent
// embeddings drawn from cluster-structured Gaussians (the group structure
// stands in for male/female); frame targets are a fixed random smooth
// network of the inputs, the 4-dim frame position, and the speaker
// embedding, plus observation noise.
struct GeneratorSpec {
  int64_t n_speakers = 10;
  int64_t n_clusters = 2;
  int64_t true_latent_dim = 2;
  int64_t n_utterances = 20;  // per speaker
  int64_t frames_per_utterance = 50;
  int64_t input_dim = 12;   // D_x, excluding the 4 position dims
  int64_t output_dim = 8;   // D_y
  double noise_std = 0.05;
  int64_t n_test_utterances = 4;   // held out per speaker
  int64_t imbalance_budget = 5;    // train utterances for target speakers
  int64_t segments_per_utterance = 5;
  double cluster_spread = 0.35;
  double cluster_separation = 3.0;
  double speaker_gain = 1.0;  // strength of the additive embedding effect

  void validate() const;
};

struct NormStats {
  // Input order: x dims then the 4 position dims.
  std::vector<double> input_min, input_max;
  std::vector<double> output_mean, output_std;
};

enum class SplitKind { kNone, kBalanced, kImbalanced };
std::string split_kind_name(SplitKind kind);
SplitKind split_kind_from_name(const std::string &name);

struct Corpus {
  GeneratorSpec spec;
  uint64_t seed = 0;
  std::string id;

  // Frame-major storage, one row per frame.
  std::vector<int64_t> speaker_id;
  std::vector<int64_t> utterance_id;  // global: speaker * n_utterances + u
  Tensor pos;  // N x 4
  Tensor x;    // N x D_x
  Tensor y;    // N x D_y

  bool normalized = false;
  NormStats norm_stats;

  SplitKind split_kind = SplitKind::kNone;
  std::map<int64_t, std::string> split;  // utterance -> "train" | "test"

  // Generator metadata for cluster-recovery scoring.
  Tensor true_embeddings;            // K x Q*
  std::vector<int64_t> cluster_of;   // per speaker
  std::vector<int64_t> targets;      // central + peripheral per cluster
  std::vector<std::string> target_roles;  // "central" | "peripheral"

  int64_t n_frames() const { return static_cast<int64_t>(speaker_id.size()); }
  int64_t model_input_dim() const { return spec.input_dim + 4; }
  bool is_target(int64_t speaker) const;
};

Corpus generate(const GeneratorSpec &spec, uint64_t seed);

// Assigns utterances to train/test. Balanced: every speaker keeps all but
// the last n_test_utterances for training. Imbalanced: target speakers
// train on only imbalance_budget utterances and the test set consists of
// target-speaker held-out utterances.
void make_splits(Corpus &corpus, SplitKind kind);

// Train-split statistics only; inputs map to [0.01, 0.99] (constant dims to
// 0.5), outputs to zero mean and unit variance (std floor 1e-8).
void normalize(Corpus &corpus);

Tensor denormalize_outputs(const Corpus &corpus, const Tensor &y_normalized);

// Model-facing view of one split: inputs are [x, pos] per frame.
struct FrameDataset {
  Tensor x;  // N x (D_x + 4)
  Tensor y;  // N x D_y
  std::vector<int64_t> speakers;
  std::vector<int64_t> utterances;
};
FrameDataset split_dataset(const Corpus &corpus, const std::string &split_name);

// Directory layout: meta.json + frames.csv (header
// speaker_id,utterance_id,pos0..pos3,x0..x{Dx-1},y0..y{Dy-1}), UTF-8, LF,
// shortest round-trip decimals. Bitwise round trip.
void save_corpus(const Corpus &corpus, const std::string &dir);
Corpus load_corpus(const std::string &dir);

}  // namespace msdgp

#endif  // MSDGP_CORPUS_H_
