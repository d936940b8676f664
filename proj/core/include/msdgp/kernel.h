// core/include/msdgp/kernel.h

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

#ifndef MSDGP_KERNEL_H_
#define MSDGP_KERNEL_H_

#include "msdgp/tape.h"
#include "msdgp/tensor.h"

namespace msdgp {

// Order-1 arc-cosine kernel
//
//   k(x, y) = sigma^2 * (1/pi) * |x||y| * (sin t + (pi - t) cos t),
//   t = arccos(x.y / (|x||y|)),
//
// the ReLU-feature-map member of the arc-cosine family. One output variance
// per layer, stored as a log for unconstrained optimization; no per-dimension
// lengthscales. k(x, .) = 0 when |x| = 0 (continuous limit), with zero
// gradient contribution.
struct ArcCosParams {
  double log_variance = 0.0;

  double variance() const;
  static ArcCosParams from_variance(double variance);
};

// n x m Gram matrix between the rows of X (n x d) and Y (m x d).
Tensor arccos_gram(const Tensor &x, const Tensor &y, const ArcCosParams &params);

// k(x_i, x_i) = sigma^2 |x_i|^2; matches the diagonal of arccos_gram(X, X)
// bitwise.
Tensor kernel_diag(const Tensor &x, const ArcCosParams &params);

// Recording variants. The Gram op is a fused tape primitive with an analytic
// adjoint; the arccos singularity at cos t = +-1 cancels in the fused form,
// so Gram diagonals differentiate cleanly.
Var arccos_gram(Tape &tape, Var x, Var y, Var log_variance);
Var kernel_diag(Tape &tape, Var x, Var log_variance);

}  // namespace msdgp

#endif  // MSDGP_KERNEL_H_
