// core/src/dgp_model.cc

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

#include "msdgp/dgp_model.h"

#include <algorithm>
#include <cmath>

#include "msdgp/error.h"
#include "msdgp/tensor_ops.h"

namespace msdgp {

namespace {

constexpr double kLog2Pi = 1.8378770664093453;  // log(2*pi)

std::string layer_param_prefix(const std::string &group, size_t index) {
  return group + "." + std::to_string(index) + ".";
}

void collect_layer_params(const std::string &prefix, GpLayer &layer,
                          std::vector<ParamRef> &out) {
  out.push_back({prefix + "inducing_inputs", &layer.inducing_inputs});
  out.push_back({prefix + "variational_mean", &layer.variational_mean});
  out.push_back({prefix + "variational_chol", &layer.variational_chol_raw});
  out.push_back({prefix + "kernel_log_variance", &layer.kernel_log_variance});
}

}  // namespace

std::string conditioning_mode_name(ConditioningMode mode) {
  switch (mode) {
    case ConditioningMode::kNone: return "none";
    case ConditioningMode::kSpeakerCode: return "speaker_code";
    case ConditioningMode::kLatent: return "latent";
  }
  return "none";
}

ConditioningMode conditioning_mode_from_name(const std::string &name) {
  if (name == "none") return ConditioningMode::kNone;
  if (name == "speaker_code") return ConditioningMode::kSpeakerCode;
  if (name == "latent") return ConditioningMode::kLatent;
  throw InvalidConfig("unknown conditioning mode '" + name + "'");
}

void ConditioningSpec::validate(int n_hidden) const {
  for (int f : feed_layers) {
    if (f < 1 || f > n_hidden)
      throw InvalidConfig("feed layer " + std::to_string(f) +
                          " outside hidden range 1.." + std::to_string(n_hidden));
  }
  if (mode != ConditioningMode::kNone && n_speakers < 1)
    throw InvalidConfig("conditioning needs n_speakers >= 1");
  if (mode == ConditioningMode::kLatent && latent_dim < 1)
    throw InvalidConfig("latent mode needs latent_dim >= 1");
  if (mode != ConditioningMode::kNone && feed_layers.empty())
    throw InvalidConfig("conditioning needs at least one feed layer");
}

bool ConditioningSpec::feeds(int hidden_layer) const {
  return std::find(feed_layers.begin(), feed_layers.end(), hidden_layer) !=
         feed_layers.end();
}

void DgpModel::validate() const {
  if (layers.empty()) throw InvalidConfig("model needs at least the output layer");
  conditioning.validate(n_hidden());
  for (const GpLayer &layer : layers) layer.validate();
  for (const GpLayer &layer : speaker_layers) layer.validate();
  if (conditioning.mode == ConditioningMode::kSpeakerCode) {
    if (speaker_layers.size() != conditioning.feed_layers.size())
      throw InvalidConfig("speaker GPs must parallel feed_layers");
  } else if (!speaker_layers.empty()) {
    throw InvalidConfig("speaker GPs present without speaker_code mode");
  }
  if ((conditioning.mode == ConditioningMode::kLatent) != speaker_latent.has_value())
    throw InvalidConfig("speaker_latent present iff latent mode");
  // Dimension chaining, including latent widening at feed layers.
  for (int l = 1; l <= n_hidden() + 1; ++l) {
    const GpLayer &layer = layers[static_cast<size_t>(l - 1)];
    if (l >= 2) {
      int64_t expect = layers[static_cast<size_t>(l - 2)].output_dim();
      if (conditioning.mode == ConditioningMode::kLatent && l <= n_hidden() &&
          conditioning.feeds(l))
        expect += conditioning.latent_dim;
      if (layer.input_dim() != expect)
        throw InvalidConfig("layer " + std::to_string(l) + " input dim " +
                            std::to_string(layer.input_dim()) + " != " +
                            std::to_string(expect));
    }
    if (conditioning.mode == ConditioningMode::kSpeakerCode && l <= n_hidden() &&
        conditioning.feeds(l)) {
      size_t idx = 0;
      while (idx < conditioning.feed_layers.size() &&
             conditioning.feed_layers[idx] != l)
        ++idx;
      const GpLayer &spk = speaker_layers[idx];
      if (spk.input_dim() != conditioning.n_speakers ||
          spk.output_dim() != layer.output_dim())
        throw InvalidConfig("speaker GP at layer " + std::to_string(l) +
                            " has wrong dims");
    }
  }
  if (speaker_latent.has_value()) {
    if (speaker_latent->mu.dim(0) != conditioning.n_speakers ||
        speaker_latent->mu.dim(1) != conditioning.latent_dim ||
        !shapes_equal(speaker_latent->mu.shape(), speaker_latent->log_var.shape()))
      throw InvalidConfig("speaker latent shapes inconsistent");
  }
  if (noise_log_var.rank() != 1 || noise_log_var.dim(0) != output_dim())
    throw InvalidConfig("noise_log_var must have one entry per output dim");
}

Tensor speaker_code(int64_t k, int64_t count) {
  if (k < 0 || k >= count)
    throw IndexOutOfRange("speaker " + std::to_string(k) + " of " +
                          std::to_string(count));
  std::vector<double> d(static_cast<size_t>(count), 0.0);
  d[static_cast<size_t>(k)] = 1.0;
  return Tensor({count}, std::move(d));
}

Tensor speaker_onehot(const std::vector<int64_t> &speakers, int64_t count) {
  int64_t b = static_cast<int64_t>(speakers.size());
  std::vector<double> d(static_cast<size_t>(b * count), 0.0);
  for (int64_t i = 0; i < b; ++i) {
    int64_t k = speakers[static_cast<size_t>(i)];
    if (k < 0 || k >= count)
      throw IndexOutOfRange("speaker " + std::to_string(k) + " of " +
                            std::to_string(count));
    d[static_cast<size_t>(i * count + k)] = 1.0;
  }
  return Tensor({b, count}, std::move(d));
}

std::vector<ParamRef> parameters(DgpModel &model) {
  std::vector<ParamRef> out;
  for (size_t l = 0; l < model.layers.size(); ++l)
    collect_layer_params(layer_param_prefix("layers", l), model.layers[l], out);
  for (size_t s = 0; s < model.speaker_layers.size(); ++s)
    collect_layer_params(layer_param_prefix("speaker_layers", s),
                         model.speaker_layers[s], out);
  if (model.speaker_latent.has_value()) {
    out.push_back({"latent.mu", &model.speaker_latent->mu});
    out.push_back({"latent.log_var", &model.speaker_latent->log_var});
  }
  out.push_back({"noise_log_var", &model.noise_log_var});
  return out;
}

BoundDgp bind_model(Tape &tape, const DgpModel &model) {
  BoundDgp bound;
  // Same walk order as parameters(); `ordered` stays index-aligned with it.
  for (const GpLayer &layer : model.layers) {
    GpLayerVars vars = bind_layer(tape, layer);
    bound.ordered.push_back(vars.inducing_inputs);
    bound.ordered.push_back(vars.variational_mean);
    bound.ordered.push_back(vars.variational_chol_raw);
    bound.ordered.push_back(vars.kernel_log_variance);
    bound.layers.push_back(vars);
  }
  for (const GpLayer &layer : model.speaker_layers) {
    GpLayerVars vars = bind_layer(tape, layer);
    bound.ordered.push_back(vars.inducing_inputs);
    bound.ordered.push_back(vars.variational_mean);
    bound.ordered.push_back(vars.variational_chol_raw);
    bound.ordered.push_back(vars.kernel_log_variance);
    bound.speaker_layers.push_back(vars);
  }
  if (model.speaker_latent.has_value()) {
    bound.latent_mu = tape.leaf(model.speaker_latent->mu);
    bound.latent_log_var = tape.leaf(model.speaker_latent->log_var);
    bound.ordered.push_back(bound.latent_mu);
    bound.ordered.push_back(bound.latent_log_var);
  }
  bound.noise_log_var = tape.leaf(model.noise_log_var);
  bound.ordered.push_back(bound.noise_log_var);
  return bound;
}

namespace {

struct EvalContext {
  std::vector<GpLayerEval> layers;
  std::vector<GpLayerEval> speaker_layers;
  // Speaker-GP moments on the K distinct one-hot codes (K x D_out each);
  // equal inputs share one function value, so draws happen per speaker and
  // are gathered to frames.
  std::vector<GpMoments> speaker_moments;
};

EvalContext begin_model_eval(Tape &tape, const DgpModel &model,
                             const BoundDgp &bound) {
  EvalContext ctx;
  ctx.layers.reserve(bound.layers.size());
  for (const GpLayerVars &vars : bound.layers)
    ctx.layers.push_back(begin_layer_eval(tape, vars));
  if (model.conditioning.mode == ConditioningMode::kSpeakerCode) {
    Var codes = tape.constant(Tensor::eye(model.conditioning.n_speakers));
    for (const GpLayerVars &vars : bound.speaker_layers) {
      GpLayerEval eval = begin_layer_eval(tape, vars);
      ctx.speaker_moments.push_back(layer_conditional(tape, vars, eval, codes));
      ctx.speaker_layers.push_back(std::move(eval));
    }
  }
  return ctx;
}

// Latent rows for one Monte Carlo sample: r_k drawn once per speaker
// (stochastic) or mu_k (mean-field), gathered to frames by the one-hot
// matrix so gradients flow into mu / log_var.
Var latent_rows(Tape &tape, const BoundDgp &bound, Var onehot, bool stochastic,
                RandomStream &rng) {
  Var r = bound.latent_mu;
  if (stochastic) {
    const Tensor &mu = tape.value(bound.latent_mu);
    Var eps = tape.constant(gaussian_sample(mu.shape(), rng));
    Var sigma = tape.sqrt(tape.exp(bound.latent_log_var));
    r = tape.add(bound.latent_mu, tape.mul(sigma, eps));
  }
  return tape.matmul(onehot, r);
}

// One pass through the stack; returns the final layer's moments.
GpMoments propagate(Tape &tape, const DgpModel &model, const BoundDgp &bound,
                    const EvalContext &ctx, Var x, Var onehot, bool stochastic,
                    RandomStream &rng) {
  Var h = x;
  int n_hidden = model.n_hidden();
  for (int l = 1; l <= n_hidden; ++l) {
    if (model.conditioning.mode == ConditioningMode::kLatent &&
        model.conditioning.feeds(l)) {
      Var rows = latent_rows(tape, bound, onehot, stochastic, rng);
      h = tape.concat({h, rows}, 1);
    }
    const GpLayerVars &vars = bound.layers[static_cast<size_t>(l - 1)];
    GpMoments moments =
        layer_conditional(tape, vars, ctx.layers[static_cast<size_t>(l - 1)], h);
    h = stochastic ? layer_sample(tape, moments, rng) : moments.mean;
    if (model.conditioning.mode == ConditioningMode::kSpeakerCode &&
        model.conditioning.feeds(l)) {
      size_t idx = 0;
      while (model.conditioning.feed_layers[idx] != l) ++idx;
      const GpMoments &spk = ctx.speaker_moments[idx];
      Var per_speaker =
          stochastic ? layer_sample(tape, spk, rng) : spk.mean;  // K x D
      h = tape.add(h, tape.matmul(onehot, per_speaker));
    }
  }
  return layer_conditional(tape, bound.layers.back(), ctx.layers.back(), h);
}

Var latent_kl(Tape &tape, const BoundDgp &bound) {
  // sum_k KL[N(mu_k, diag sigma^2_k) || N(0, I)]
  //   = 0.5 sum (mu^2 + sigma^2 - 1 - log sigma^2).
  Var mu2 = tape.mul(bound.latent_mu, bound.latent_mu);
  Var sigma2 = tape.exp(bound.latent_log_var);
  const Tensor &mu = tape.value(bound.latent_mu);
  Var ones = tape.constant(Tensor::full(mu.shape(), 1.0));
  Var inner = tape.sub(tape.add(mu2, sigma2), tape.add(ones, bound.latent_log_var));
  return tape.mul(tape.constant_scalar(0.5), tape.sum(inner));
}

}  // namespace

Var elbo_objective(Tape &tape, const DgpModel &model, const BoundDgp &bound,
                   const Batch &batch, int64_t n_total, int n_samples,
                   RandomStream &rng) {
  int64_t b = batch.x.dim(0);
  if (b < 1) throw InvalidConfig("empty batch");
  if (n_total < b) throw InvalidConfig("n_total smaller than batch");
  if (n_samples < 1) throw InvalidConfig("n_samples must be >= 1");
  if (batch.y.rank() != 2 || batch.y.dim(0) != b ||
      batch.y.dim(1) != model.output_dim())
    throw ShapeMismatch("batch targets " + shape_to_string(batch.y.shape()));

  EvalContext ctx = begin_model_eval(tape, model, bound);
  Var x = tape.constant(batch.x);
  Var y = tape.constant(batch.y);
  Var onehot;
  if (model.conditioning.mode != ConditioningMode::kNone)
    onehot = tape.constant(
        speaker_onehot(batch.speakers, model.conditioning.n_speakers));

  // Expected log-likelihood under the final-layer conditional, closed form:
  // -0.5 log(2 pi sigma_d^2) - ((y - mu)^2 + v) / (2 sigma_d^2).
  Var noise_var = tape.exp(bound.noise_log_var);  // [D_y]
  Var ll_sum = tape.constant_scalar(0.0);
  for (int j = 0; j < n_samples; ++j) {
    GpMoments fin = propagate(tape, model, bound, ctx, x, onehot, true, rng);
    Var diff = tape.sub(y, fin.mean);
    Var quad = tape.div(tape.add(tape.mul(diff, diff), fin.var), noise_var);
    Var ll = tape.neg(tape.mul(tape.constant_scalar(0.5), tape.sum(quad)));
    ll_sum = tape.add(ll_sum, ll);
  }
  Var const_term = tape.mul(
      tape.constant_scalar(-0.5 * static_cast<double>(b)),
      tape.sum(tape.add(tape.constant(Tensor::full({model.output_dim()}, kLog2Pi)),
                        bound.noise_log_var)));
  Var likelihood = tape.add(
      tape.mul(tape.constant_scalar(1.0 / n_samples), ll_sum), const_term);
  // Scale the likelihood up to the full dataset; KL terms stay unscaled.
  Var objective = tape.mul(
      tape.constant_scalar(static_cast<double>(n_total) / static_cast<double>(b)),
      likelihood);
  for (size_t l = 0; l < bound.layers.size(); ++l)
    objective = tape.sub(objective,
                         layer_kl(tape, bound.layers[l], ctx.layers[l]));
  for (size_t s = 0; s < bound.speaker_layers.size(); ++s)
    objective = tape.sub(
        objective, layer_kl(tape, bound.speaker_layers[s], ctx.speaker_layers[s]));
  if (model.conditioning.mode == ConditioningMode::kLatent)
    objective = tape.sub(objective, latent_kl(tape, bound));
  return objective;
}

double elbo(const DgpModel &model, const Batch &batch, int64_t n_total,
            int n_samples, RandomStream &rng) {
  Tape tape;
  BoundDgp bound = bind_model(tape, model);
  return tape.value(elbo_objective(tape, model, bound, batch, n_total,
                                   n_samples, rng))
      .item();
}

Tensor forward(const DgpModel &model, const Tensor &x,
               const std::vector<int64_t> &speakers, int n_samples,
               PropagationMode mode, RandomStream &rng) {
  model.validate();
  if (x.rank() != 2 || x.dim(1) != model.input_dim())
    throw ShapeMismatch("forward input " + shape_to_string(x.shape()));
  if (static_cast<int64_t>(speakers.size()) != x.dim(0) &&
      model.conditioning.mode != ConditioningMode::kNone)
    throw ShapeMismatch("speakers length vs batch");
  if (n_samples < 1) throw InvalidConfig("n_samples must be >= 1");
  Tape tape;
  BoundDgp bound = bind_model(tape, model);
  EvalContext ctx = begin_model_eval(tape, model, bound);
  Var xv = tape.constant(x);
  Var onehot;
  if (model.conditioning.mode != ConditioningMode::kNone)
    onehot = tape.constant(speaker_onehot(speakers, model.conditioning.n_speakers));
  bool stochastic = mode == PropagationMode::kStochastic;
  std::vector<Tensor> samples;
  samples.reserve(static_cast<size_t>(n_samples));
  for (int j = 0; j < n_samples; ++j) {
    GpMoments fin = propagate(tape, model, bound, ctx, xv, onehot, stochastic, rng);
    Tensor mean = tape.value(fin.mean);
    samples.push_back(ops::reshape(mean, {1, mean.dim(0), mean.dim(1)}));
  }
  Tensor out = samples.size() == 1 ? samples[0] : ops::concat(samples, 0);
  if (!out.all_finite()) throw DivergenceDetected("non-finite forward output");
  return out;
}

Tensor predict(const DgpModel &model, const Tensor &x,
               const std::vector<int64_t> &speakers) {
  RandomStream rng(0);
  Tensor out = forward(model, x, speakers, 1, PropagationMode::kMeanField, rng);
  return ops::reshape(out, {out.dim(1), out.dim(2)});
}

}  // namespace msdgp
