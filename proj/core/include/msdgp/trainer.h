// core/include/msdgp/trainer.h

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

#ifndef MSDGP_TRAINER_H_
#define MSDGP_TRAINER_H_

#include <cstdint>
#include <vector>

#include "msdgp/corpus.h"
#include "msdgp/dgp_model.h"
#include "msdgp/dnn_model.h"

namespace msdgp {

struct TrainConfig {
  int64_t batch_size = 1024;
  int epochs = 50;             // 100 for the DNN baseline
  double learning_rate = 0.01; // 1e-4 for the DNN baseline
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  int n_samples = 1;
  uint64_t seed = 0;
  int oversample_factor = 20;  // replication of target-speaker frames

  void validate() const;
};

// Per-parameter first/second Adam moments, index-aligned with the model's
// parameters() order.
struct AdamState {
  std::vector<Tensor> m;
  std::vector<Tensor> v;
  int64_t step = 0;
};

AdamState init_adam_state(const std::vector<ParamRef> &params);

// One bias-corrected Adam update. A pure transition: replaying the same
// (params, grads) sequence reproduces the same states. Parameters with
// requires_grad() false are left untouched.
void adam_step(std::vector<ParamRef> &params, const std::vector<Tensor> &grads,
               AdamState &state, const TrainConfig &config);

// Architecture description shared by initialization and checkpoints.
struct DgpArchitecture {
  ConditioningMode mode = ConditioningMode::kNone;
  int64_t input_dim = 0;
  int64_t output_dim = 0;
  int n_hidden = 2;
  int64_t width = 8;
  int64_t m_hidden = 32;
  int64_t m_speaker = 8;
  int64_t n_speakers = 0;
  int64_t latent_dim = 0;
  std::vector<int> feed_layers;  // empty => all hidden layers

  std::vector<int> resolved_feed_layers() const;
};

// Z drawn from N(0,1); variational means zero; variational factors
// 1e-3 * I for hidden and speaker GPs and I for the output layer; latent
// means drawn from N(0, 1e-4) with Sigma_k = 1e-4 * I; likelihood noise
// variance 0.01 per output dim.
DgpModel init_model(const DgpArchitecture &arch, RandomStream &rng);

struct TrainResult {
  std::vector<double> objective;  // per epoch: mean minibatch ELBO (or MSE)
  std::vector<double> wall_ms;    // per epoch
};

// Minibatch Adam on the ELBO over the corpus train split. Frame-level
// shuffling per epoch with the seeded stream; target-speaker frames are
// replicated oversample_factor times per epoch. Throws DivergenceDetected
// on a non-finite objective.
TrainResult train(DgpModel &model, const Corpus &corpus, const TrainConfig &config);

// Same loop minimizing mean squared error.
TrainResult dnn_train(DnnModel &model, const Corpus &corpus, const TrainConfig &config);

// Trace CSV: header epoch,objective,wall_ms.
std::string trace_to_csv(const TrainResult &result);

}  // namespace msdgp

#endif  // MSDGP_TRAINER_H_
