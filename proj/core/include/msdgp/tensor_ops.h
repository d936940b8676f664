// core/include/msdgp/tensor_ops.h

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

#ifndef MSDGP_TENSOR_OPS_H_
#define MSDGP_TENSOR_OPS_H_

#include <functional>
#include <vector>

#include "msdgp/tensor.h"

// Plain (non-recording) numeric kernels. Elementwise binaries broadcast with
// the usual right-aligned rules (dimensions must match or be 1). All results
// are freshly allocated; inputs are never modified.
namespace msdgp {
namespace ops {

Shape broadcast_shape(const Shape &a, const Shape &b);

Tensor add(const Tensor &a, const Tensor &b);
Tensor sub(const Tensor &a, const Tensor &b);
Tensor mul(const Tensor &a, const Tensor &b);
Tensor div(const Tensor &a, const Tensor &b);
Tensor neg(const Tensor &a);
Tensor scale(const Tensor &a, double c);
Tensor add_scalar(const Tensor &a, double c);

Tensor exp(const Tensor &a);
Tensor log(const Tensor &a);
Tensor sqrt(const Tensor &a);
Tensor relu(const Tensor &a);
// acos of the input clamped to [-1, 1].
Tensor arccos_clamped(const Tensor &a);
Tensor clamp_min(const Tensor &a, double floor);
Tensor map(const Tensor &a, const std::function<double(double)> &f);

// a broadcast up to `shape`; reverse of sum_to.
Tensor broadcast_to(const Tensor &a, const Shape &shape);
// Sum `a` down to `shape` (summing broadcast axes); adjoint of broadcast_to.
Tensor sum_to(const Tensor &a, const Shape &shape);

Tensor sum(const Tensor &a);                  // rank-0 result
Tensor sum_axis(const Tensor &a, int axis);   // drops the axis
double sum_value(const Tensor &a);

Tensor reshape(const Tensor &a, Shape shape);
Tensor transpose(const Tensor &a);            // 2-D
Tensor matmul(const Tensor &a, const Tensor &b);  // 2-D x 2-D

Tensor concat(const std::vector<Tensor> &parts, int axis);
Tensor slice(const Tensor &a, const std::vector<int64_t> &begin,
             const std::vector<int64_t> &size);

// Extracts rows of `a` (first axis) at the given indices.
Tensor take_rows(const Tensor &a, const std::vector<int64_t> &indices);

}  // namespace ops
}  // namespace msdgp

#endif  // MSDGP_TENSOR_OPS_H_
