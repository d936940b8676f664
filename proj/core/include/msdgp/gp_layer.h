// core/include/msdgp/gp_layer.h

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

#ifndef MSDGP_GP_LAYER_H_
#define MSDGP_GP_LAYER_H_

#include <utility>
#include <vector>

#include "msdgp/kernel.h"
#include "msdgp/rng.h"
#include "msdgp/tape.h"
#include "msdgp/tensor.h"

namespace msdgp {

enum class MeanFunctionKind {
  kZero,
  // Fixed (non-trained) identity: pass the input through, truncating or
  // zero-padding coordinates when input and output widths differ.
  kIdentityProjection,
};

// One sparse variational GP layer with M inducing points. The per-output-dim
// posterior q(u_d) = N(m_d, S_d) keeps a full covariance, parameterized by
// its Cholesky factor with log-stored diagonal so S_d stays SPD.
struct GpLayer {
  Tensor inducing_inputs;       // M x D_in
  Tensor variational_mean;      // M x D_out
  Tensor variational_chol_raw;  // D_out x M x M (strict lower free, diag = log)
  Tensor kernel_log_variance;   // rank-0
  MeanFunctionKind mean_fn = MeanFunctionKind::kZero;

  int64_t n_inducing() const { return inducing_inputs.dim(0); }
  int64_t input_dim() const { return inducing_inputs.dim(1); }
  int64_t output_dim() const { return variational_mean.dim(1); }

  // Z ~ N(0,1), m = 0, L_d = chol_diag_init * I, kernel variance 1.
  static GpLayer create(int64_t input_dim, int64_t output_dim, int64_t n_inducing,
                        MeanFunctionKind mean_fn, double chol_diag_init,
                        RandomStream &rng);
  // Dim consistency plus the no-duplicate-inducing-rows invariant.
  void validate() const;
};

// Bound tape handles for one layer's parameters.
struct GpLayerVars {
  Var inducing_inputs;
  Var variational_mean;
  Var variational_chol_raw;
  Var kernel_log_variance;
  MeanFunctionKind mean_fn;
  int64_t n_inducing, input_dim, output_dim;
};

GpLayerVars bind_layer(Tape &tape, const GpLayer &layer);

// Per-evaluation context: the jittered K_ZZ factorization and materialized
// covariance factors, computed once per ELBO/forward evaluation and shared
// between the conditional and the KL term.
struct GpLayerEval {
  Var chol_kzz;             // M x M lower
  Var whitened_mean;        // L^{-1} m, M x D_out
  std::vector<Var> chol_s;  // D_out materialized factors L_d, M x M
  double jitter = 0.0;      // diagonal shift actually applied
};

// Jitter policy: add 1e-6 * mean(diag) before factorizing; on a failed
// factorization retry once with 1e-4 * mean(diag), then fail.
GpLayerEval begin_layer_eval(Tape &tape, const GpLayerVars &vars);

struct GpMoments {
  Var mean;  // B x D_out
  Var var;   // B x D_out, floored at 1e-12
};

// Sparse predictive conditional at inputs H (B x D_in): per output dim d,
//   mu_d(h) = mean_fn(h)_d + k_hZ K^-1 m_d
//   v_d(h)  = k(h,h) - k_hZ K^-1 k_Zh + k_hZ K^-1 S_d K^-1 k_Zh.
GpMoments layer_conditional(Tape &tape, const GpLayerVars &vars,
                            const GpLayerEval &eval, Var input);

// Reparameterized draw mean + sqrt(var) * eps, eps ~ N(0, I).
Var layer_sample(Tape &tape, const GpMoments &moments, RandomStream &rng);

// sum_d KL[N(m_d, S_d) || N(0, K_ZZ)].
Var layer_kl(Tape &tape, const GpLayerVars &vars, const GpLayerEval &eval);

// One-shot convenience wrappers over an internal tape.
std::pair<Tensor, Tensor> conditional(const GpLayer &layer, const Tensor &inputs);
Tensor sample_output(const GpLayer &layer, const Tensor &inputs, RandomStream &rng);
double kl_to_prior(const GpLayer &layer);

}  // namespace msdgp

#endif  // MSDGP_GP_LAYER_H_
