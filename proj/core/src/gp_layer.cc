// core/src/gp_layer.cc

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

#include "msdgp/gp_layer.h"

#include <cmath>
#include <string>

#include "msdgp/error.h"
#include "msdgp/tensor_ops.h"

namespace msdgp {

namespace {

constexpr double kVarianceFloor = 1e-12;

Tensor lower_strict_mask(int64_t m) {
  std::vector<double> d(static_cast<size_t>(m * m), 0.0);
  for (int64_t i = 0; i < m; ++i)
    for (int64_t j = 0; j < i; ++j) d[static_cast<size_t>(i * m + j)] = 1.0;
  return Tensor({m, m}, std::move(d));
}

// Materializes L_d = strict_lower(raw_d) + diag(exp(diag(raw_d))).
Var materialize_chol(Tape &tape, Var raw_d, int64_t m) {
  Var strict = tape.mul(raw_d, tape.constant(lower_strict_mask(m)));
  Var diag = tape.mul(tape.exp(raw_d), tape.constant(Tensor::eye(m)));
  return tape.add(strict, diag);
}

Var mean_function(Tape &tape, MeanFunctionKind kind, Var input, int64_t output_dim) {
  if (kind == MeanFunctionKind::kZero) {
    const Tensor &v = tape.value(input);
    return tape.constant(Tensor::zeros({v.dim(0), output_dim}));
  }
  const Tensor &v = tape.value(input);
  int64_t b = v.dim(0), d_in = v.dim(1);
  if (d_in == output_dim) return input;
  if (d_in > output_dim) return tape.slice(input, {0, 0}, {b, output_dim});
  Var pad = tape.constant(Tensor::zeros({b, output_dim - d_in}));
  return tape.concat({input, pad}, 1);
}

}  // namespace

GpLayer GpLayer::create(int64_t input_dim, int64_t output_dim, int64_t n_inducing,
                        MeanFunctionKind mean_fn, double chol_diag_init,
                        RandomStream &rng) {
  if (input_dim < 1 || output_dim < 1 || n_inducing < 1)
    throw InvalidConfig("GpLayer dims must be positive");
  if (!(chol_diag_init > 0.0))
    throw InvalidConfig("chol_diag_init must be positive");
  GpLayer layer;
  layer.inducing_inputs =
      gaussian_sample({n_inducing, input_dim}, rng).with_requires_grad(true);
  layer.variational_mean =
      Tensor::zeros({n_inducing, output_dim}).with_requires_grad(true);
  double log_diag = std::log(chol_diag_init);
  std::vector<double> raw(
      static_cast<size_t>(output_dim * n_inducing * n_inducing), 0.0);
  for (int64_t d = 0; d < output_dim; ++d)
    for (int64_t i = 0; i < n_inducing; ++i)
      raw[static_cast<size_t>((d * n_inducing + i) * n_inducing + i)] = log_diag;
  layer.variational_chol_raw =
      Tensor({output_dim, n_inducing, n_inducing}, std::move(raw))
          .with_requires_grad(true);
  layer.kernel_log_variance = Tensor::scalar(0.0).with_requires_grad(true);
  layer.mean_fn = mean_fn;
  layer.validate();
  return layer;
}

void GpLayer::validate() const {
  if (inducing_inputs.rank() != 2 || variational_mean.rank() != 2 ||
      variational_chol_raw.rank() != 3 || kernel_log_variance.rank() != 0)
    throw InvalidConfig("GpLayer field ranks inconsistent");
  int64_t m = n_inducing();
  if (variational_mean.dim(0) != m || variational_chol_raw.dim(1) != m ||
      variational_chol_raw.dim(2) != m ||
      variational_chol_raw.dim(0) != output_dim())
    throw InvalidConfig("GpLayer shapes inconsistent");
  // Duplicate inducing rows make K_ZZ singular beyond what jitter absorbs.
  auto z = inducing_inputs.data();
  int64_t d = input_dim();
  for (int64_t i = 0; i < m; ++i) {
    for (int64_t j = i + 1; j < m; ++j) {
      double dist2 = 0.0;
      for (int64_t k = 0; k < d; ++k) {
        double diff = z[i * d + k] - z[j * d + k];
        dist2 += diff * diff;
      }
      if (dist2 <= 1e-16)
        throw InvalidConfig("duplicate inducing inputs at rows " +
                            std::to_string(i) + "," + std::to_string(j));
    }
  }
}

GpLayerVars bind_layer(Tape &tape, const GpLayer &layer) {
  GpLayerVars vars;
  vars.inducing_inputs = tape.leaf(layer.inducing_inputs);
  vars.variational_mean = tape.leaf(layer.variational_mean);
  vars.variational_chol_raw = tape.leaf(layer.variational_chol_raw);
  vars.kernel_log_variance = tape.leaf(layer.kernel_log_variance);
  vars.mean_fn = layer.mean_fn;
  vars.n_inducing = layer.n_inducing();
  vars.input_dim = layer.input_dim();
  vars.output_dim = layer.output_dim();
  return vars;
}

GpLayerEval begin_layer_eval(Tape &tape, const GpLayerVars &vars) {
  int64_t m = vars.n_inducing;
  Var kzz = arccos_gram(tape, vars.inducing_inputs, vars.inducing_inputs,
                        vars.kernel_log_variance);
  Var eye = tape.constant(Tensor::eye(m));
  // Jitter rides the tape so its dependence on the diagonal is differentiated.
  Var diag_mean = tape.sum(tape.mul(kzz, eye));
  GpLayerEval eval;
  Var chol;
  bool done = false;
  for (double rel : {1e-6, 1e-4}) {
    Var jitter = tape.mul(diag_mean, tape.constant_scalar(rel / static_cast<double>(m)));
    Var shifted = tape.add(kzz, tape.mul(jitter, eye));
    try {
      chol = tape.cholesky(shifted);
      eval.jitter = tape.value(jitter).item();
      done = true;
      break;
    } catch (const NotPositiveDefinite &) {
      continue;
    }
  }
  if (!done)
    throw NotPositiveDefinite("K_ZZ not factorizable after jitter retries");
  eval.chol_kzz = chol;
  eval.whitened_mean = tape.triangular_solve(chol, vars.variational_mean, false);
  eval.chol_s.reserve(static_cast<size_t>(vars.output_dim));
  for (int64_t d = 0; d < vars.output_dim; ++d) {
    Var raw_d = tape.reshape(
        tape.slice(vars.variational_chol_raw, {d, 0, 0}, {1, m, m}), {m, m});
    eval.chol_s.push_back(materialize_chol(tape, raw_d, m));
  }
  return eval;
}

GpMoments layer_conditional(Tape &tape, const GpLayerVars &vars,
                            const GpLayerEval &eval, Var input) {
  const Tensor &h = tape.value(input);
  if (h.rank() != 2 || h.dim(1) != vars.input_dim)
    throw ShapeMismatch("layer input " + shape_to_string(h.shape()) +
                        " vs input_dim " + std::to_string(vars.input_dim));
  int64_t b = h.dim(0);
  Var kzh = arccos_gram(tape, vars.inducing_inputs, input, vars.kernel_log_variance);
  Var a = tape.triangular_solve(eval.chol_kzz, kzh, false);  // M x B
  Var mean = tape.add(mean_function(tape, vars.mean_fn, input, vars.output_dim),
                      tape.matmul(tape.transpose(a), eval.whitened_mean));
  // Variance: k(h,h) - |a|^2 per column, plus the S_d inflation.
  Var kdiag = kernel_diag(tape, input, vars.kernel_log_variance);      // [B]
  Var qf = tape.sum_axis(tape.mul(a, a), 0);                           // [B]
  Var base = tape.reshape(tape.sub(kdiag, qf), {b, 1});
  Var w = tape.triangular_solve(eval.chol_kzz, a, true);               // K^-1 k_Zh
  std::vector<Var> cols;
  cols.reserve(static_cast<size_t>(vars.output_dim));
  for (int64_t d = 0; d < vars.output_dim; ++d) {
    Var t_d = tape.matmul(tape.transpose(eval.chol_s[static_cast<size_t>(d)]), w);
    Var s_d = tape.sum_axis(tape.mul(t_d, t_d), 0);                    // [B]
    cols.push_back(tape.add(base, tape.reshape(s_d, {b, 1})));
  }
  GpMoments moments;
  moments.mean = mean;
  moments.var = tape.clamp_min(tape.concat(cols, 1), kVarianceFloor);
  return moments;
}

Var layer_sample(Tape &tape, const GpMoments &moments, RandomStream &rng) {
  Var eps = tape.constant(gaussian_sample(tape.value(moments.mean).shape(), rng));
  return tape.add(moments.mean, tape.mul(tape.sqrt(moments.var), eps));
}

Var layer_kl(Tape &tape, const GpLayerVars &vars, const GpLayerEval &eval) {
  int64_t m = vars.n_inducing;
  Var eye = tape.constant(Tensor::eye(m));
  // log det K_ZZ = 2 sum log diag L.
  Var l_diag = tape.sum_axis(tape.mul(eval.chol_kzz, eye), 1);
  Var logdet_k = tape.mul(tape.constant_scalar(2.0), tape.sum(tape.log(l_diag)));
  Var mahalanobis = tape.sum(tape.mul(eval.whitened_mean, eval.whitened_mean));
  Var total = tape.constant_scalar(0.0);
  for (int64_t d = 0; d < vars.output_dim; ++d) {
    Var l_s = eval.chol_s[static_cast<size_t>(d)];
    Var c = tape.triangular_solve(eval.chol_kzz, l_s, false);
    Var trace = tape.sum(tape.mul(c, c));
    // log det S_d = 2 * sum of the raw log-diagonal.
    Var raw_d = tape.reshape(
        tape.slice(vars.variational_chol_raw, {d, 0, 0}, {1, m, m}), {m, m});
    Var logdet_s = tape.mul(tape.constant_scalar(2.0), tape.sum(tape.mul(raw_d, eye)));
    Var term = tape.add(tape.sub(trace, tape.constant_scalar(static_cast<double>(m))),
                        tape.sub(logdet_k, logdet_s));
    total = tape.add(total, term);
  }
  total = tape.add(total, mahalanobis);
  return tape.mul(tape.constant_scalar(0.5), total);
}

std::pair<Tensor, Tensor> conditional(const GpLayer &layer, const Tensor &inputs) {
  Tape tape;
  GpLayerVars vars = bind_layer(tape, layer);
  GpLayerEval eval = begin_layer_eval(tape, vars);
  GpMoments moments = layer_conditional(tape, vars, eval, tape.constant(inputs));
  return {tape.value(moments.mean), tape.value(moments.var)};
}

Tensor sample_output(const GpLayer &layer, const Tensor &inputs, RandomStream &rng) {
  Tape tape;
  GpLayerVars vars = bind_layer(tape, layer);
  GpLayerEval eval = begin_layer_eval(tape, vars);
  GpMoments moments = layer_conditional(tape, vars, eval, tape.constant(inputs));
  return tape.value(layer_sample(tape, moments, rng));
}

double kl_to_prior(const GpLayer &layer) {
  Tape tape;
  GpLayerVars vars = bind_layer(tape, layer);
  GpLayerEval eval = begin_layer_eval(tape, vars);
  return tape.value(layer_kl(tape, vars, eval)).item();
}

}  // namespace msdgp
