// core/include/msdgp/dgp_model.h

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

#ifndef MSDGP_DGP_MODEL_H_
#define MSDGP_DGP_MODEL_H_

#include <optional>
#include <string>
#include <vector>

#include "msdgp/gp_layer.h"
#include "msdgp/rng.h"
#include "msdgp/tape.h"
#include "msdgp/tensor.h"

namespace msdgp {

enum class ConditioningMode { kNone, kSpeakerCode, kLatent };

std::string conditioning_mode_name(ConditioningMode mode);
ConditioningMode conditioning_mode_from_name(const std::string &name);

// How speaker identity enters the stack. feed_layers are 1-based hidden
// layer indices: in speaker-code mode layer l gains an additive speaker-GP
// term; in latent mode the latent rows are concatenated onto layer l's
// input. Feeding the output layer is not allowed.
struct ConditioningSpec {
  ConditioningMode mode = ConditioningMode::kNone;
  std::vector<int> feed_layers;
  int64_t latent_dim = 0;
  int64_t n_speakers = 0;

  void validate(int n_hidden) const;
  bool feeds(int hidden_layer) const;
};

// Per-speaker variational Gaussian over the latent embedding r_k: row k of
// mu / log_var is N(mu_k, diag(exp(log_var_k))). Prior is N(0, I).
struct SpeakerLatent {
  Tensor mu;       // K x Q
  Tensor log_var;  // K x Q, log of the diagonal of Sigma_k
};

struct DgpModel {
  std::vector<GpLayer> layers;          // L hidden + 1 output
  std::vector<GpLayer> speaker_layers;  // parallel to feed_layers (speaker-code)
  std::optional<SpeakerLatent> speaker_latent;
  Tensor noise_log_var;                 // [D_y] log likelihood variances
  ConditioningSpec conditioning;

  int n_hidden() const { return static_cast<int>(layers.size()) - 1; }
  int64_t input_dim() const { return layers.front().input_dim(); }
  int64_t output_dim() const { return layers.back().output_dim(); }
  void validate() const;
};

// One-hot code for speaker k out of K.
Tensor speaker_code(int64_t k, int64_t count);
// B x K matrix whose row i is speaker_code(speakers[i], K).
Tensor speaker_onehot(const std::vector<int64_t> &speakers, int64_t count);

enum class PropagationMode { kStochastic, kMeanField };

// Mutable view of every trainable tensor, in a stable order shared with
// bind_model and the checkpoint format.
struct ParamRef {
  std::string name;
  Tensor *tensor;
};
std::vector<ParamRef> parameters(DgpModel &model);

struct BoundDgp {
  std::vector<GpLayerVars> layers;
  std::vector<GpLayerVars> speaker_layers;
  Var latent_mu;
  Var latent_log_var;
  Var noise_log_var;
  std::vector<Var> ordered;  // aligned with parameters()
};
BoundDgp bind_model(Tape &tape, const DgpModel &model);

struct Batch {
  Tensor x;                        // B x D_x
  Tensor y;                        // B x D_y (may be empty for forward)
  std::vector<int64_t> speakers;   // length B
};

// Recorded ELBO estimate: likelihood term scaled by n_total/B, KL terms
// unscaled, hidden layers sampled (stochastic) or propagated by mean, final
// layer integrated in closed form.
Var elbo_objective(Tape &tape, const DgpModel &model, const BoundDgp &bound,
                   const Batch &batch, int64_t n_total, int n_samples,
                   RandomStream &rng);

double elbo(const DgpModel &model, const Batch &batch, int64_t n_total,
            int n_samples, RandomStream &rng);

// n_samples x B x D_y predictions. Mean-field propagates conditional means
// (and latent means) with no sampling; every sample slice is then identical.
Tensor forward(const DgpModel &model, const Tensor &x,
               const std::vector<int64_t> &speakers, int n_samples,
               PropagationMode mode, RandomStream &rng);

// Mean-field B x D_y prediction, the synthesis path.
Tensor predict(const DgpModel &model, const Tensor &x,
               const std::vector<int64_t> &speakers);

}  // namespace msdgp

#endif  // MSDGP_DGP_MODEL_H_
