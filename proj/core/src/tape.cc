// core/src/tape.cc

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

#include "msdgp/tape.h"

#include <algorithm>
#include <cmath>

#include "msdgp/error.h"
#include "msdgp/linalg.h"
#include "msdgp/tensor_ops.h"

namespace msdgp {

namespace {

// Lower triangle with the diagonal halved; the "phi" map of the standard
// Cholesky reverse rule.
Tensor phi_lower(const Tensor &a) {
  int64_t n = a.dim(0);
  std::vector<double> out(static_cast<size_t>(n * n), 0.0);
  auto ad = a.data();
  for (int64_t i = 0; i < n; ++i) {
    for (int64_t j = 0; j < i; ++j) out[static_cast<size_t>(i * n + j)] = ad[i * n + j];
    out[static_cast<size_t>(i * n + i)] = 0.5 * ad[i * n + i];
  }
  return Tensor({n, n}, std::move(out));
}

Tensor mask_lower(const Tensor &a) {
  int64_t n = a.dim(0);
  std::vector<double> out(static_cast<size_t>(n * n), 0.0);
  auto ad = a.data();
  for (int64_t i = 0; i < n; ++i)
    for (int64_t j = 0; j <= i; ++j) out[static_cast<size_t>(i * n + j)] = ad[i * n + j];
  return Tensor({n, n}, std::move(out));
}

// Inverse of ops::slice: writes `adj` into a zero tensor of shape `full` at
// offset `begin`.
Tensor scatter_slice(const Tensor &adj, const Shape &full,
                     const std::vector<int64_t> &begin) {
  std::vector<double> out(static_cast<size_t>(shape_numel(full)), 0.0);
  int rank = static_cast<int>(full.size());
  std::vector<int64_t> strides(full.size(), 1);
  for (int i = rank - 2; i >= 0; --i)
    strides[static_cast<size_t>(i)] = strides[static_cast<size_t>(i + 1)] * full[static_cast<size_t>(i + 1)];
  std::vector<int64_t> idx(full.size(), 0);
  auto ad = adj.data();
  int64_t n = adj.numel();
  for (int64_t flat = 0; flat < n; ++flat) {
    int64_t dst = 0;
    for (int k = 0; k < rank; ++k)
      dst += (begin[static_cast<size_t>(k)] + idx[static_cast<size_t>(k)]) * strides[static_cast<size_t>(k)];
    out[static_cast<size_t>(dst)] = ad[flat];
    for (int k = rank - 1; k >= 0; --k) {
      if (++idx[static_cast<size_t>(k)] < adj.shape()[static_cast<size_t>(k)]) break;
      idx[static_cast<size_t>(k)] = 0;
    }
  }
  return Tensor(full, std::move(out));
}

}  // namespace

Var Tape::record(std::vector<Var> inputs, Tensor value, Backward backward) {
  bool needs = false;
  for (Var v : inputs) needs = needs || nodes_[static_cast<size_t>(v.id)].needs_grad;
  nodes_.push_back(Node{std::move(value), std::move(inputs), std::move(backward), needs});
  return Var{static_cast<int32_t>(nodes_.size() - 1)};
}

Var Tape::leaf(const Tensor &value) {
  nodes_.push_back(Node{value, {}, {}, value.requires_grad()});
  return Var{static_cast<int32_t>(nodes_.size() - 1)};
}

Var Tape::constant(const Tensor &value) {
  nodes_.push_back(Node{value, {}, {}, false});
  return Var{static_cast<int32_t>(nodes_.size() - 1)};
}

Var Tape::constant_scalar(double value) { return constant(Tensor::scalar(value)); }

const Tensor &Tape::value(Var v) const {
  if (!v.valid() || static_cast<size_t>(v.id) >= nodes_.size())
    throw IndexOutOfRange("invalid Var");
  return nodes_[static_cast<size_t>(v.id)].value;
}

Var Tape::add(Var a, Var b) {
  const Tensor va = value(a), vb = value(b);
  return record({a, b}, ops::add(va, vb),
                [va, vb](const Tensor &adj, const Accumulator &acc) {
                  acc(0, ops::sum_to(adj, va.shape()));
                  acc(1, ops::sum_to(adj, vb.shape()));
                });
}

Var Tape::sub(Var a, Var b) {
  const Tensor va = value(a), vb = value(b);
  return record({a, b}, ops::sub(va, vb),
                [va, vb](const Tensor &adj, const Accumulator &acc) {
                  acc(0, ops::sum_to(adj, va.shape()));
                  acc(1, ops::sum_to(ops::neg(adj), vb.shape()));
                });
}

Var Tape::mul(Var a, Var b) {
  const Tensor va = value(a), vb = value(b);
  return record({a, b}, ops::mul(va, vb),
                [va, vb](const Tensor &adj, const Accumulator &acc) {
                  acc(0, ops::sum_to(ops::mul(adj, vb), va.shape()));
                  acc(1, ops::sum_to(ops::mul(adj, va), vb.shape()));
                });
}

Var Tape::div(Var a, Var b) {
  const Tensor va = value(a), vb = value(b);
  Tensor out = ops::div(va, vb);
  return record({a, b}, out,
                [va, vb, out](const Tensor &adj, const Accumulator &acc) {
                  acc(0, ops::sum_to(ops::div(adj, vb), va.shape()));
                  acc(1, ops::sum_to(ops::neg(ops::div(ops::mul(adj, out), vb)),
                                     vb.shape()));
                });
}

Var Tape::neg(Var a) {
  return record({a}, ops::neg(value(a)),
                [](const Tensor &adj, const Accumulator &acc) {
                  acc(0, ops::neg(adj));
                });
}

Var Tape::matmul(Var a, Var b) {
  const Tensor va = value(a), vb = value(b);
  return record({a, b}, ops::matmul(va, vb),
                [va, vb](const Tensor &adj, const Accumulator &acc) {
                  acc(0, ops::matmul(adj, ops::transpose(vb)));
                  acc(1, ops::matmul(ops::transpose(va), adj));
                });
}

Var Tape::transpose(Var a) {
  return record({a}, ops::transpose(value(a)),
                [](const Tensor &adj, const Accumulator &acc) {
                  acc(0, ops::transpose(adj));
                });
}

Var Tape::log(Var a) {
  const Tensor va = value(a);
  return record({a}, ops::log(va),
                [va](const Tensor &adj, const Accumulator &acc) {
                  acc(0, ops::div(adj, va));
                });
}

Var Tape::exp(Var a) {
  Tensor out = ops::exp(value(a));
  return record({a}, out, [out](const Tensor &adj, const Accumulator &acc) {
    acc(0, ops::mul(adj, out));
  });
}

Var Tape::sqrt(Var a) {
  Tensor out = ops::sqrt(value(a));
  return record({a}, out, [out](const Tensor &adj, const Accumulator &acc) {
    acc(0, ops::div(ops::scale(adj, 0.5), out));
  });
}

Var Tape::relu(Var a) {
  const Tensor va = value(a);
  return record({a}, ops::relu(va),
                [va](const Tensor &adj, const Accumulator &acc) {
                  Tensor mask = ops::map(va, [](double x) { return x > 0.0 ? 1.0 : 0.0; });
                  acc(0, ops::mul(adj, mask));
                });
}

Var Tape::arccos(Var a) {
  const Tensor va = value(a);
  return record({a}, ops::arccos_clamped(va),
                [va](const Tensor &adj, const Accumulator &acc) {
                  // d/dx acos(x) = -1/sqrt(1-x^2); |x| clamped to 1 - 1e-9
                  // to keep the diagonal case finite.
                  Tensor d = ops::map(va, [](double x) {
                    double c = std::clamp(x, -(1.0 - 1e-9), 1.0 - 1e-9);
                    return -1.0 / std::sqrt(1.0 - c * c);
                  });
                  acc(0, ops::mul(adj, d));
                });
}

Var Tape::clamp_min(Var a, double floor) {
  const Tensor va = value(a);
  return record({a}, ops::clamp_min(va, floor),
                [va, floor](const Tensor &adj, const Accumulator &acc) {
                  Tensor mask = ops::map(
                      va, [floor](double x) { return x > floor ? 1.0 : 0.0; });
                  acc(0, ops::mul(adj, mask));
                });
}

Var Tape::sum(Var a) {
  const Shape shape = value(a).shape();
  return record({a}, ops::sum(value(a)),
                [shape](const Tensor &adj, const Accumulator &acc) {
                  acc(0, ops::broadcast_to(adj, shape));
                });
}

Var Tape::sum_axis(Var a, int axis) {
  const Shape shape = value(a).shape();
  return record({a}, ops::sum_axis(value(a), axis),
                [shape, axis](const Tensor &adj, const Accumulator &acc) {
                  Shape keep = shape;
                  keep[static_cast<size_t>(axis)] = 1;
                  acc(0, ops::broadcast_to(ops::reshape(adj, keep), shape));
                });
}

Var Tape::broadcast_to(Var a, const Shape &shape) {
  const Shape in_shape = value(a).shape();
  return record({a}, ops::broadcast_to(value(a), shape),
                [in_shape](const Tensor &adj, const Accumulator &acc) {
                  acc(0, ops::sum_to(adj, in_shape));
                });
}

Var Tape::reshape(Var a, const Shape &shape) {
  const Shape in_shape = value(a).shape();
  return record({a}, ops::reshape(value(a), shape),
                [in_shape](const Tensor &adj, const Accumulator &acc) {
                  acc(0, ops::reshape(adj, in_shape));
                });
}

Var Tape::concat(const std::vector<Var> &parts, int axis) {
  std::vector<Tensor> values;
  values.reserve(parts.size());
  for (Var v : parts) values.push_back(value(v));
  Tensor out = ops::concat(values, axis);
  std::vector<Shape> shapes;
  for (const Tensor &t : values) shapes.push_back(t.shape());
  return record(parts, out,
                [shapes, axis](const Tensor &adj, const Accumulator &acc) {
                  std::vector<int64_t> begin(adj.rank(), 0);
                  for (size_t p = 0; p < shapes.size(); ++p) {
                    std::vector<int64_t> size(shapes[p].begin(), shapes[p].end());
                    acc(p, ops::slice(adj, begin, size));
                    begin[static_cast<size_t>(axis)] += shapes[p][static_cast<size_t>(axis)];
                  }
                });
}

Var Tape::slice(Var a, const std::vector<int64_t> &begin,
                const std::vector<int64_t> &size) {
  const Shape in_shape = value(a).shape();
  return record({a}, ops::slice(value(a), begin, size),
                [in_shape, begin](const Tensor &adj, const Accumulator &acc) {
                  acc(0, scatter_slice(adj, in_shape, begin));
                });
}

Var Tape::cholesky(Var a) {
  Tensor l = msdgp::cholesky(value(a));  // may throw; nothing recorded then
  return record({a}, l, [l](const Tensor &adj, const Accumulator &acc) {
    // A_bar = 0.5 (S + S^T), S = L^{-T} phi(L^T L_bar) L^{-1}.
    Tensor p = phi_lower(ops::matmul(ops::transpose(l), adj));
    Tensor y = msdgp::triangular_solve(l, p, true);
    Tensor s = ops::transpose(msdgp::triangular_solve(l, ops::transpose(y), true));
    acc(0, ops::scale(ops::add(s, ops::transpose(s)), 0.5));
  });
}

Var Tape::triangular_solve(Var l, Var b, bool transpose_l) {
  const Tensor vl = value(l);
  Tensor x = msdgp::triangular_solve(vl, value(b), transpose_l);
  return record({l, b}, x,
                [vl, x, transpose_l](const Tensor &adj, const Accumulator &acc) {
                  if (transpose_l) {
                    Tensor b_bar = msdgp::triangular_solve(vl, adj, false);
                    acc(0, mask_lower(ops::neg(ops::matmul(x, ops::transpose(b_bar)))));
                    acc(1, b_bar);
                  } else {
                    Tensor b_bar = msdgp::triangular_solve(vl, adj, true);
                    acc(0, mask_lower(ops::neg(ops::matmul(b_bar, ops::transpose(x)))));
                    acc(1, b_bar);
                  }
                });
}

Var Tape::custom(const std::vector<Var> &inputs, Tensor value, Backward backward) {
  return record(inputs, std::move(value), std::move(backward));
}

void Tape::backward(Var output) {
  if (!output.valid() || static_cast<size_t>(output.id) >= nodes_.size())
    throw IndexOutOfRange("backward on invalid Var");
  if (value(output).numel() != 1)
    throw ShapeMismatch("backward wants a scalar output, got " +
                        shape_to_string(value(output).shape()));
  adjoints_.assign(nodes_.size(), Tensor());
  has_adjoint_.assign(nodes_.size(), false);
  accumulate(output, Tensor::full(value(output).shape(), 1.0));
  for (size_t i = nodes_.size(); i-- > 0;) {
    Node &node = nodes_[i];
    if (!has_adjoint_[i] || !node.backward || !node.needs_grad) continue;
    const Tensor &adj = adjoints_[i];
    auto acc = [this, &node](size_t input_index, const Tensor &grad) {
      accumulate(node.inputs[input_index], grad);
    };
    node.backward(adj, acc);
  }
}

void Tape::accumulate(Var v, const Tensor &grad) {
  size_t i = static_cast<size_t>(v.id);
  if (!nodes_[i].needs_grad) return;
  if (!shapes_equal(grad.shape(), nodes_[i].value.shape()))
    throw ShapeMismatch("adjoint shape " + shape_to_string(grad.shape()) +
                        " vs value " + shape_to_string(nodes_[i].value.shape()));
  if (has_adjoint_[i]) {
    adjoints_[i] = ops::add(adjoints_[i], grad);
  } else {
    adjoints_[i] = grad;
    has_adjoint_[i] = true;
  }
}

Tensor Tape::gradient(Var leaf_var) const {
  size_t i = static_cast<size_t>(leaf_var.id);
  if (i >= nodes_.size()) throw IndexOutOfRange("gradient of invalid Var");
  if (i < has_adjoint_.size() && has_adjoint_[i]) return adjoints_[i];
  return Tensor::zeros(nodes_[i].value.shape());
}

std::vector<Tensor> grad(Tape &tape, Var output, const std::vector<Var> &params) {
  tape.backward(output);
  std::vector<Tensor> out;
  out.reserve(params.size());
  for (Var p : params) out.push_back(tape.gradient(p));
  return out;
}

}  // namespace msdgp
