// core/include/msdgp/tape.h

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

#ifndef MSDGP_TAPE_H_
#define MSDGP_TAPE_H_

#include <cstdint>
#include <functional>
#include <vector>

#include "msdgp/tensor.h"

namespace msdgp {

// Handle to a node on a Tape.
struct Var {
  int32_t id = -1;
  bool valid() const { return id >= 0; }
};

// Reverse-mode tape. Forward calls evaluate eagerly and record one node per
// primitive; backward() replays adjoints in exact reverse recording order.
// Recording is single-threaded per training step.
//
// Primitives: add, sub, mul, div (broadcasting), neg, matmul, transpose,
// log, exp, sqrt, relu, arccos (argument clamped to [-1,1], gradient clamped
// to |c| <= 1 - 1e-9), clamp_min, reductions (sum, sum_axis), broadcast_to,
// reshape, concat, slice, cholesky, triangular_solve, and the fused
// arc-cosine Gram kernels (see kernel.h).
class Tape {
 public:
  Tape() = default;
  Tape(const Tape &) = delete;
  Tape &operator=(const Tape &) = delete;

  // Leaf with gradient tracking per value.requires_grad(); constants are
  // leaves that never receive gradients.
  Var leaf(const Tensor &value);
  Var constant(const Tensor &value);
  Var constant_scalar(double value);

  const Tensor &value(Var v) const;
  size_t size() const { return nodes_.size(); }

  Var add(Var a, Var b);
  Var sub(Var a, Var b);
  Var mul(Var a, Var b);
  Var div(Var a, Var b);
  Var neg(Var a);
  Var matmul(Var a, Var b);
  Var transpose(Var a);
  Var log(Var a);
  Var exp(Var a);
  Var sqrt(Var a);
  Var relu(Var a);
  Var arccos(Var a);
  Var clamp_min(Var a, double floor);
  Var sum(Var a);
  Var sum_axis(Var a, int axis);
  Var broadcast_to(Var a, const Shape &shape);
  Var reshape(Var a, const Shape &shape);
  Var concat(const std::vector<Var> &parts, int axis);
  Var slice(Var a, const std::vector<int64_t> &begin,
            const std::vector<int64_t> &size);
  // chol((A + A^T)/2); throws NotPositiveDefinite on a non-positive pivot
  // without recording a node.
  Var cholesky(Var a);
  Var triangular_solve(Var l, Var b, bool transpose_l);

  // Hook for fused primitives (kernel Gram etc.). The backward function
  // receives the output adjoint and an accumulator: accumulate(i, g) adds g
  // to the adjoint of inputs[i].
  using Accumulator = std::function<void(size_t input_index, const Tensor &grad)>;
  using Backward = std::function<void(const Tensor &out_adjoint, const Accumulator &)>;
  Var custom(const std::vector<Var> &inputs, Tensor value, Backward backward);

  // Seeds the adjoint of `output` (a single-element tensor) with 1 and
  // replays the tape. Gradients of leaves are then available until the next
  // backward() call.
  void backward(Var output);

  // Accumulated gradient of a leaf; the zero tensor of its shape when the
  // leaf never influenced the output.
  Tensor gradient(Var leaf_var) const;

 private:
  struct Node {
    Tensor value;
    std::vector<Var> inputs;
    Backward backward;  // empty for leaves/constants
    bool needs_grad = false;
  };

  Var record(std::vector<Var> inputs, Tensor value, Backward backward);
  void accumulate(Var v, const Tensor &grad);

  std::vector<Node> nodes_;
  std::vector<Tensor> adjoints_;
  std::vector<bool> has_adjoint_;
};

// Convenience: gradients of `output` with respect to `params`, aligned by
// index; parameters the output never touched get zero tensors.
std::vector<Tensor> grad(Tape &tape, Var output, const std::vector<Var> &params);

}  // namespace msdgp

#endif  // MSDGP_TAPE_H_
