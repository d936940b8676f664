// core/src/dnn_model.cc

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

#include "msdgp/dnn_model.h"

#include <algorithm>
#include <cmath>

#include "msdgp/error.h"
#include "msdgp/tensor_ops.h"

namespace msdgp {

void DnnModel::validate() const {
  if (weights.empty() || weights.size() != biases.size())
    throw InvalidConfig("DNN needs aligned weights/biases");
  if (speaker_proj.size() != feed_points.size())
    throw InvalidConfig("speaker projections must parallel feed points");
  int l_max = n_hidden();
  for (size_t i = 0; i < weights.size(); ++i) {
    if (weights[i].rank() != 2 || biases[i].rank() != 1 ||
        biases[i].dim(0) != weights[i].dim(1))
      throw InvalidConfig("DNN layer " + std::to_string(i) + " shapes");
    if (i > 0 && weights[i].dim(0) != weights[i - 1].dim(1))
      throw InvalidConfig("DNN layer chain broken at " + std::to_string(i));
  }
  for (size_t p = 0; p < feed_points.size(); ++p) {
    int point = feed_points[p];
    if (point < 0 || point > l_max)
      throw InvalidConfig("feed point " + std::to_string(point));
    int64_t width = point == 0 ? input_dim() : weights[static_cast<size_t>(point - 1)].dim(1);
    if (speaker_proj[p].dim(0) != n_speakers || speaker_proj[p].dim(1) != width)
      throw InvalidConfig("speaker projection " + std::to_string(p) + " shape");
  }
}

DnnModel init_dnn_model(const DnnArchitecture &arch, RandomStream &rng) {
  if (arch.input_dim < 1 || arch.output_dim < 1 || arch.n_hidden < 0 ||
      arch.width < 1)
    throw InvalidConfig("DNN architecture dims");
  DnnModel model;
  model.n_speakers = arch.n_speakers;
  std::vector<int64_t> dims;
  dims.push_back(arch.input_dim);
  for (int l = 0; l < arch.n_hidden; ++l) dims.push_back(arch.width);
  dims.push_back(arch.output_dim);
  for (size_t i = 0; i + 1 < dims.size(); ++i) {
    int64_t fan_in = dims[i], fan_out = dims[i + 1];
    double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    std::vector<double> w(static_cast<size_t>(fan_in * fan_out));
    for (double &v : w) v = (2.0 * rng.next_double() - 1.0) * bound;
    model.weights.push_back(
        Tensor({fan_in, fan_out}, std::move(w)).with_requires_grad(true));
    model.biases.push_back(Tensor::zeros({fan_out}).with_requires_grad(true));
  }
  std::vector<int> feeds = arch.feed_points;
  if (feeds.empty() && arch.n_speakers > 0) {
    for (int l = 1; l <= arch.n_hidden; ++l) feeds.push_back(l);
  }
  model.feed_points = feeds;
  for (int point : feeds) {
    int64_t width = point == 0 ? arch.input_dim : dims[static_cast<size_t>(point)];
    model.speaker_proj.push_back(
        Tensor::zeros({arch.n_speakers, width}).with_requires_grad(true));
  }
  model.validate();
  return model;
}

std::vector<ParamRef> parameters(DnnModel &model) {
  std::vector<ParamRef> out;
  for (size_t i = 0; i < model.weights.size(); ++i) {
    out.push_back({"weights." + std::to_string(i), &model.weights[i]});
    out.push_back({"biases." + std::to_string(i), &model.biases[i]});
  }
  for (size_t p = 0; p < model.speaker_proj.size(); ++p)
    out.push_back({"speaker_proj." + std::to_string(p), &model.speaker_proj[p]});
  return out;
}

BoundDnn bind_dnn(Tape &tape, const DnnModel &model) {
  BoundDnn bound;
  for (size_t i = 0; i < model.weights.size(); ++i) {
    bound.weights.push_back(tape.leaf(model.weights[i]));
    bound.biases.push_back(tape.leaf(model.biases[i]));
    bound.ordered.push_back(bound.weights.back());
    bound.ordered.push_back(bound.biases.back());
  }
  for (const Tensor &p : model.speaker_proj) {
    bound.speaker_proj.push_back(tape.leaf(p));
    bound.ordered.push_back(bound.speaker_proj.back());
  }
  return bound;
}

Var dnn_forward_var(Tape &tape, const DnnModel &model, const BoundDnn &bound,
                    Var x, Var onehot) {
  auto inject = [&](Var h, int point) {
    if (!onehot.valid()) return h;
    for (size_t p = 0; p < model.feed_points.size(); ++p) {
      if (model.feed_points[p] == point)
        return tape.add(h, tape.matmul(onehot, bound.speaker_proj[p]));
    }
    return h;
  };
  Var h = inject(x, 0);
  int n_layers = static_cast<int>(model.weights.size());
  for (int i = 0; i < n_layers; ++i) {
    Var z = tape.add(tape.matmul(h, bound.weights[static_cast<size_t>(i)]),
                     tape.broadcast_to(
                         tape.reshape(bound.biases[static_cast<size_t>(i)],
                                      {1, tape.value(bound.biases[static_cast<size_t>(i)]).dim(0)}),
                         {tape.value(h).dim(0),
                          tape.value(bound.biases[static_cast<size_t>(i)]).dim(0)}));
    if (i + 1 < n_layers) {
      h = inject(tape.relu(z), i + 1);
    } else {
      h = z;  // linear output layer
    }
  }
  return h;
}

Tensor dnn_forward(const DnnModel &model, const Tensor &x,
                   const std::vector<int64_t> &speakers) {
  model.validate();
  if (x.rank() != 2 || x.dim(1) != model.input_dim())
    throw ShapeMismatch("dnn_forward input " + shape_to_string(x.shape()));
  Tape tape;
  BoundDnn bound = bind_dnn(tape, model);
  Var onehot;
  if (!model.feed_points.empty())
    onehot = tape.constant(speaker_onehot(speakers, model.n_speakers));
  return tape.value(dnn_forward_var(tape, model, bound, tape.constant(x), onehot));
}

}  // namespace msdgp
