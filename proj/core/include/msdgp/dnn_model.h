// core/include/msdgp/dnn_model.h

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

#ifndef MSDGP_DNN_MODEL_H_
#define MSDGP_DNN_MODEL_H_

#include <string>
#include <vector>

#include "msdgp/dgp_model.h"
#include "msdgp/rng.h"
#include "msdgp/tape.h"
#include "msdgp/tensor.h"

namespace msdgp {

// Feed-forward baseline with one-hot speaker-code injection:
//
//   h^{l+1} = relu(W^{l+1} (h^l + W_S^l S) + b^{l+1}),  linear output layer.
//
// feed_points are positions in the activation chain (0 = the input vector,
// l = hidden activation l); a position carries one K-column projection.
struct DnnModel {
  std::vector<Tensor> weights;       // L+1 matrices, D_in x D_out (row-major batch)
  std::vector<Tensor> biases;        // L+1 vectors
  std::vector<Tensor> speaker_proj;  // parallel to feed_points, K x width(point)
  std::vector<int> feed_points;
  int64_t n_speakers = 0;

  int n_hidden() const { return static_cast<int>(weights.size()) - 1; }
  int64_t input_dim() const { return weights.front().dim(0); }
  int64_t output_dim() const { return weights.back().dim(1); }
  void validate() const;
};

struct DnnArchitecture {
  int64_t input_dim = 0;
  int64_t output_dim = 0;
  int n_hidden = 2;
  int64_t width = 64;
  int64_t n_speakers = 0;
  std::vector<int> feed_points;  // empty => all hidden activations (1..L)
};

// Uniform fan-in initialization (+-1/sqrt(fan_in)), seeded via rng;
// speaker projections start at zero.
DnnModel init_dnn_model(const DnnArchitecture &arch, RandomStream &rng);

std::vector<ParamRef> parameters(DnnModel &model);

struct BoundDnn {
  std::vector<Var> weights, biases, speaker_proj;
  std::vector<Var> ordered;  // aligned with parameters()
};
BoundDnn bind_dnn(Tape &tape, const DnnModel &model);

Var dnn_forward_var(Tape &tape, const DnnModel &model, const BoundDnn &bound,
                    Var x, Var onehot);

// B x D_y forward pass.
Tensor dnn_forward(const DnnModel &model, const Tensor &x,
                   const std::vector<int64_t> &speakers);

}  // namespace msdgp

#endif  // MSDGP_DNN_MODEL_H_
