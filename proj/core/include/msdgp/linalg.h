// core/include/msdgp/linalg.h

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

#ifndef MSDGP_LINALG_H_
#define MSDGP_LINALG_H_

#include "msdgp/tensor.h"

namespace msdgp {

// Lower-triangular L with (A + A^T)/2 = L L^T. The input must be symmetric
// within 1e-10 (relative to its largest entry). Throws NotPositiveDefinite
// when a pivot is <= 0; callers holding a kernel Gram matrix retry with more
// jitter before giving up.
Tensor cholesky(const Tensor &a);

// Solves L X = B (transpose_l = false) or L^T X = B (transpose_l = true)
// where L is lower triangular. Only the lower triangle of L is read.
Tensor triangular_solve(const Tensor &l, const Tensor &b, bool transpose_l);

}  // namespace msdgp

#endif  // MSDGP_LINALG_H_
