// core/src/trainer.cc

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

#include "msdgp/trainer.h"

#include <chrono>
#include <cmath>
#include <sstream>

#include "msdgp/error.h"
#include "msdgp/io_util.h"
#include "msdgp/log.h"
#include "msdgp/tensor_ops.h"

namespace msdgp {

namespace {

// Stream ids reserved by the training loop.
constexpr uint64_t kStreamInit = 1;
constexpr uint64_t kStreamShuffle = 2;
constexpr uint64_t kStreamStep = 3;

void fisher_yates(std::vector<int64_t> &indices, RandomStream &rng) {
  for (size_t i = indices.size(); i > 1; --i) {
    size_t j = static_cast<size_t>(rng.next_below(i));
    std::swap(indices[i - 1], indices[j]);
  }
}

// Epoch index list: every train frame once, target-speaker frames
// oversample_factor times.
std::vector<int64_t> epoch_indices(const FrameDataset &ds, const Corpus &corpus,
                                   int oversample_factor) {
  std::vector<int64_t> out;
  out.reserve(ds.speakers.size());
  for (size_t i = 0; i < ds.speakers.size(); ++i) {
    int n = corpus.split_kind == SplitKind::kImbalanced &&
                    corpus.is_target(ds.speakers[i])
                ? oversample_factor
                : 1;
    for (int c = 0; c < n; ++c) out.push_back(static_cast<int64_t>(i));
  }
  return out;
}

Batch assemble_batch(const FrameDataset &ds, const std::vector<int64_t> &order,
                     size_t begin, size_t end) {
  std::vector<int64_t> rows(order.begin() + static_cast<std::ptrdiff_t>(begin),
                            order.begin() + static_cast<std::ptrdiff_t>(end));
  Batch batch;
  batch.x = ops::take_rows(ds.x, rows);
  batch.y = ops::take_rows(ds.y, rows);
  batch.speakers.reserve(rows.size());
  for (int64_t r : rows) batch.speakers.push_back(ds.speakers[static_cast<size_t>(r)]);
  return batch;
}

double now_ms() {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

}  // namespace

void TrainConfig::validate() const {
  if (batch_size < 1) throw InvalidConfig("batch_size >= 1");
  if (epochs < 0) throw InvalidConfig("epochs >= 0");
  if (!(learning_rate > 0.0)) throw InvalidConfig("learning_rate > 0");
  if (n_samples < 1) throw InvalidConfig("n_samples >= 1");
  if (oversample_factor < 1) throw InvalidConfig("oversample_factor >= 1");
}

AdamState init_adam_state(const std::vector<ParamRef> &params) {
  AdamState state;
  state.m.reserve(params.size());
  state.v.reserve(params.size());
  for (const ParamRef &p : params) {
    state.m.push_back(Tensor::zeros(p.tensor->shape()));
    state.v.push_back(Tensor::zeros(p.tensor->shape()));
  }
  return state;
}

void adam_step(std::vector<ParamRef> &params, const std::vector<Tensor> &grads,
               AdamState &state, const TrainConfig &config) {
  if (params.size() != grads.size() || params.size() != state.m.size())
    throw ShapeMismatch("adam_step alignment");
  state.step += 1;
  double t = static_cast<double>(state.step);
  double bc1 = 1.0 - std::pow(config.beta1, t);
  double bc2 = 1.0 - std::pow(config.beta2, t);
  for (size_t i = 0; i < params.size(); ++i) {
    Tensor &theta = *params[i].tensor;
    const Tensor &g = grads[i];
    if (!shapes_equal(g.shape(), theta.shape()))
      throw ShapeMismatch("gradient shape for " + params[i].name);
    auto md = state.m[i].data();
    auto vd = state.v[i].data();
    auto gd = g.data();
    auto td = theta.data();
    std::vector<double> m_new(md.begin(), md.end());
    std::vector<double> v_new(vd.begin(), vd.end());
    std::vector<double> t_new(td.begin(), td.end());
    bool update = theta.requires_grad();
    for (size_t k = 0; k < m_new.size(); ++k) {
      m_new[k] = config.beta1 * m_new[k] + (1.0 - config.beta1) * gd[k];
      v_new[k] = config.beta2 * v_new[k] + (1.0 - config.beta2) * gd[k] * gd[k];
      if (update) {
        double m_hat = m_new[k] / bc1;
        double v_hat = v_new[k] / bc2;
        t_new[k] -= config.learning_rate * m_hat / (std::sqrt(v_hat) + config.epsilon);
      }
    }
    state.m[i] = Tensor(theta.shape(), std::move(m_new));
    state.v[i] = Tensor(theta.shape(), std::move(v_new));
    if (update)
      theta = Tensor(theta.shape(), std::move(t_new)).with_requires_grad(true);
  }
}

std::vector<int> DgpArchitecture::resolved_feed_layers() const {
  if (mode == ConditioningMode::kNone) return {};
  if (!feed_layers.empty()) return feed_layers;
  std::vector<int> all;
  for (int l = 1; l <= n_hidden; ++l) all.push_back(l);
  return all;
}

DgpModel init_model(const DgpArchitecture &arch, RandomStream &rng) {
  if (arch.input_dim < 1 || arch.output_dim < 1)
    throw InvalidConfig("init_model dims");
  if (arch.n_hidden < 0 || arch.width < 1 || arch.m_hidden < 1)
    throw InvalidConfig("init_model architecture");
  DgpModel model;
  model.conditioning.mode = arch.mode;
  model.conditioning.feed_layers = arch.resolved_feed_layers();
  model.conditioning.latent_dim = arch.mode == ConditioningMode::kLatent ? arch.latent_dim : 0;
  model.conditioning.n_speakers = arch.n_speakers;

  for (int l = 1; l <= arch.n_hidden; ++l) {
    int64_t d_in = l == 1 ? arch.input_dim : arch.width;
    if (arch.mode == ConditioningMode::kLatent && model.conditioning.feeds(l))
      d_in += arch.latent_dim;
    model.layers.push_back(GpLayer::create(d_in, arch.width, arch.m_hidden,
                                           MeanFunctionKind::kIdentityProjection,
                                           1e-3, rng));
  }
  int64_t final_in = arch.n_hidden > 0 ? arch.width : arch.input_dim;
  model.layers.push_back(GpLayer::create(final_in, arch.output_dim, arch.m_hidden,
                                         MeanFunctionKind::kZero, 1.0, rng));
  if (arch.mode == ConditioningMode::kSpeakerCode) {
    for (int l : model.conditioning.feed_layers) {
      (void)l;
      model.speaker_layers.push_back(GpLayer::create(
          arch.n_speakers, arch.width, arch.m_speaker, MeanFunctionKind::kZero,
          1e-3, rng));
    }
  }
  if (arch.mode == ConditioningMode::kLatent) {
    SpeakerLatent latent;
    latent.mu = ops::scale(gaussian_sample({arch.n_speakers, arch.latent_dim}, rng), 1e-2)
                    .with_requires_grad(true);
    latent.log_var =
        Tensor::full({arch.n_speakers, arch.latent_dim}, std::log(1e-4))
            .with_requires_grad(true);
    model.speaker_latent = std::move(latent);
  }
  model.noise_log_var =
      Tensor::full({arch.output_dim}, std::log(0.01)).with_requires_grad(true);
  model.validate();
  return model;
}

TrainResult train(DgpModel &model, const Corpus &corpus, const TrainConfig &config) {
  config.validate();
  model.validate();
  FrameDataset ds = split_dataset(corpus, "train");
  if (ds.speakers.empty()) throw EmptyTrainSplit("train split has no frames");
  std::vector<ParamRef> params = parameters(model);
  AdamState state = init_adam_state(params);
  std::vector<int64_t> base = epoch_indices(ds, corpus, config.oversample_factor);
  int64_t n_total = static_cast<int64_t>(base.size());
  TrainResult result;
  uint64_t step_counter = 0;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    double t0 = now_ms();
    std::vector<int64_t> order = base;
    RandomStream shuffle_rng =
        RandomStream(config.seed, kStreamShuffle).split(static_cast<uint64_t>(epoch));
    fisher_yates(order, shuffle_rng);
    double objective_sum = 0.0;
    int64_t n_batches = 0;
    for (size_t begin = 0; begin < order.size();
         begin += static_cast<size_t>(config.batch_size)) {
      size_t end = std::min(order.size(), begin + static_cast<size_t>(config.batch_size));
      Batch batch = assemble_batch(ds, order, begin, end);
      RandomStream step_rng = RandomStream(config.seed, kStreamStep).split(step_counter);
      ++step_counter;
      Tape tape;
      BoundDgp bound = bind_model(tape, model);
      Var objective = elbo_objective(tape, model, bound, batch, n_total,
                                     config.n_samples, step_rng);
      double value = tape.value(objective).item();
      if (!std::isfinite(value))
        throw DivergenceDetected("ELBO became non-finite at epoch " +
                                 std::to_string(epoch));
      Var loss = tape.neg(objective);
      std::vector<Tensor> grads = grad(tape, loss, bound.ordered);
      adam_step(params, grads, state, config);
      objective_sum += value;
      ++n_batches;
    }
    result.objective.push_back(objective_sum / static_cast<double>(n_batches));
    result.wall_ms.push_back(now_ms() - t0);
    MSDGP_DEBUG("epoch " << epoch << " elbo " << result.objective.back());
  }
  return result;
}

TrainResult dnn_train(DnnModel &model, const Corpus &corpus, const TrainConfig &config) {
  config.validate();
  model.validate();
  FrameDataset ds = split_dataset(corpus, "train");
  if (ds.speakers.empty()) throw EmptyTrainSplit("train split has no frames");
  std::vector<ParamRef> params = parameters(model);
  AdamState state = init_adam_state(params);
  std::vector<int64_t> base = epoch_indices(ds, corpus, config.oversample_factor);
  TrainResult result;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    double t0 = now_ms();
    std::vector<int64_t> order = base;
    RandomStream shuffle_rng =
        RandomStream(config.seed, kStreamShuffle).split(static_cast<uint64_t>(epoch));
    fisher_yates(order, shuffle_rng);
    double loss_sum = 0.0;
    int64_t n_batches = 0;
    for (size_t begin = 0; begin < order.size();
         begin += static_cast<size_t>(config.batch_size)) {
      size_t end = std::min(order.size(), begin + static_cast<size_t>(config.batch_size));
      Batch batch = assemble_batch(ds, order, begin, end);
      Tape tape;
      BoundDnn bound = bind_dnn(tape, model);
      Var onehot;
      if (!model.feed_points.empty())
        onehot = tape.constant(speaker_onehot(batch.speakers, model.n_speakers));
      Var pred = dnn_forward_var(tape, model, bound, tape.constant(batch.x), onehot);
      Var diff = tape.sub(pred, tape.constant(batch.y));
      Var mse = tape.mul(tape.constant_scalar(1.0 / static_cast<double>(
                                                  batch.x.dim(0) * batch.y.dim(1))),
                         tape.sum(tape.mul(diff, diff)));
      double value = tape.value(mse).item();
      if (!std::isfinite(value))
        throw DivergenceDetected("MSE became non-finite at epoch " +
                                 std::to_string(epoch));
      std::vector<Tensor> grads = grad(tape, mse, bound.ordered);
      adam_step(params, grads, state, config);
      loss_sum += value;
      ++n_batches;
    }
    result.objective.push_back(loss_sum / static_cast<double>(n_batches));
    result.wall_ms.push_back(now_ms() - t0);
    MSDGP_DEBUG("epoch " << epoch << " mse " << result.objective.back());
  }
  return result;
}

std::string trace_to_csv(const TrainResult &result) {
  std::ostringstream oss;
  oss << "epoch,objective,wall_ms\n";
  for (size_t e = 0; e < result.objective.size(); ++e)
    oss << e << "," << format_double(result.objective[e]) << ","
        << format_double(result.wall_ms[e]) << "\n";
  return oss.str();
}

}  // namespace msdgp
