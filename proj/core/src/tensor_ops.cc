// core/src/tensor_ops.cc

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

#include "msdgp/tensor_ops.h"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

#include "msdgp/error.h"

namespace msdgp {
namespace ops {

namespace {

using RowMajor =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMap = Eigen::Map<const RowMajor>;
using MutMap = Eigen::Map<RowMajor>;

ConstMap as_matrix(const Tensor &t) {
  if (t.rank() != 2) throw ShapeMismatch("expected rank-2, got " + shape_to_string(t.shape()));
  return ConstMap(t.data().data(), t.dim(0), t.dim(1));
}

// Row-major strides, with stride 0 on broadcast (size-1) axes.
std::vector<int64_t> broadcast_strides(const Shape &from, const Shape &to) {
  std::vector<int64_t> strides(to.size(), 0);
  int64_t s = 1;
  int offset = static_cast<int>(to.size() - from.size());
  for (int i = static_cast<int>(from.size()) - 1; i >= 0; --i) {
    if (from[i] == to[i + offset]) {
      strides[i + offset] = s;
    } else if (from[i] == 1) {
      strides[i + offset] = 0;
    } else {
      throw ShapeMismatch("cannot broadcast " + shape_to_string(from) + " to " +
                          shape_to_string(to));
    }
    s *= from[i];
  }
  return strides;
}

template <typename F>
Tensor binary_op(const Tensor &a, const Tensor &b, F f) {
  // Same-shape fast path covers nearly all calls.
  if (a.shape() == b.shape()) {
    std::vector<double> out(a.data().begin(), a.data().end());
    auto bd = b.data();
    for (size_t i = 0; i < out.size(); ++i) out[i] = f(out[i], bd[i]);
    return Tensor(a.shape(), std::move(out));
  }
  Shape shape = broadcast_shape(a.shape(), b.shape());
  auto sa = broadcast_strides(a.shape(), shape);
  auto sb = broadcast_strides(b.shape(), shape);
  int64_t n = shape_numel(shape);
  int rank = static_cast<int>(shape.size());
  std::vector<double> out(static_cast<size_t>(n));
  std::vector<int64_t> idx(shape.size(), 0);
  auto ad = a.data();
  auto bd = b.data();
  for (int64_t flat = 0; flat < n; ++flat) {
    int64_t ia = 0, ib = 0;
    for (int k = 0; k < rank; ++k) {
      ia += idx[k] * sa[k];
      ib += idx[k] * sb[k];
    }
    out[static_cast<size_t>(flat)] = f(ad[ia], bd[ib]);
    for (int k = rank - 1; k >= 0; --k) {
      if (++idx[k] < shape[k]) break;
      idx[k] = 0;
    }
  }
  return Tensor(std::move(shape), std::move(out));
}

}  // namespace

Shape broadcast_shape(const Shape &a, const Shape &b) {
  size_t rank = std::max(a.size(), b.size());
  Shape out(rank, 1);
  for (size_t i = 0; i < rank; ++i) {
    int64_t da = i < rank - a.size() ? 1 : a[i - (rank - a.size())];
    int64_t db = i < rank - b.size() ? 1 : b[i - (rank - b.size())];
    if (da == db || da == 1 || db == 1) {
      out[i] = std::max(da, db);
    } else {
      throw ShapeMismatch("incompatible broadcast " + shape_to_string(a) +
                          " vs " + shape_to_string(b));
    }
  }
  return out;
}

Tensor add(const Tensor &a, const Tensor &b) {
  return binary_op(a, b, [](double x, double y) { return x + y; });
}
Tensor sub(const Tensor &a, const Tensor &b) {
  return binary_op(a, b, [](double x, double y) { return x - y; });
}
Tensor mul(const Tensor &a, const Tensor &b) {
  return binary_op(a, b, [](double x, double y) { return x * y; });
}
Tensor div(const Tensor &a, const Tensor &b) {
  return binary_op(a, b, [](double x, double y) { return x / y; });
}

Tensor map(const Tensor &a, const std::function<double(double)> &f) {
  std::vector<double> out(a.data().begin(), a.data().end());
  for (double &v : out) v = f(v);
  return Tensor(a.shape(), std::move(out));
}

Tensor neg(const Tensor &a) {
  return map(a, [](double x) { return -x; });
}
Tensor scale(const Tensor &a, double c) {
  return map(a, [c](double x) { return c * x; });
}
Tensor add_scalar(const Tensor &a, double c) {
  return map(a, [c](double x) { return x + c; });
}
Tensor exp(const Tensor &a) {
  return map(a, [](double x) { return std::exp(x); });
}
Tensor log(const Tensor &a) {
  return map(a, [](double x) { return std::log(x); });
}
Tensor sqrt(const Tensor &a) {
  return map(a, [](double x) { return std::sqrt(x); });
}
Tensor relu(const Tensor &a) {
  return map(a, [](double x) { return x > 0.0 ? x : 0.0; });
}
Tensor arccos_clamped(const Tensor &a) {
  return map(a, [](double x) { return std::acos(std::clamp(x, -1.0, 1.0)); });
}
Tensor clamp_min(const Tensor &a, double floor) {
  return map(a, [floor](double x) { return x < floor ? floor : x; });
}

Tensor broadcast_to(const Tensor &a, const Shape &shape) {
  return binary_op(Tensor::zeros(shape), a, [](double, double y) { return y; });
}

Tensor sum_to(const Tensor &a, const Shape &shape) {
  if (a.shape() == shape) return a;
  auto strides = broadcast_strides(shape, a.shape());
  std::vector<double> out(static_cast<size_t>(shape_numel(shape)), 0.0);
  int rank = a.rank();
  std::vector<int64_t> idx(static_cast<size_t>(rank), 0);
  auto ad = a.data();
  int64_t n = a.numel();
  for (int64_t flat = 0; flat < n; ++flat) {
    int64_t io = 0;
    for (int k = 0; k < rank; ++k) io += idx[static_cast<size_t>(k)] * strides[static_cast<size_t>(k)];
    out[static_cast<size_t>(io)] += ad[flat];
    for (int k = rank - 1; k >= 0; --k) {
      if (++idx[static_cast<size_t>(k)] < a.shape()[static_cast<size_t>(k)]) break;
      idx[static_cast<size_t>(k)] = 0;
    }
  }
  return Tensor(shape, std::move(out));
}

Tensor sum(const Tensor &a) { return Tensor::scalar(sum_value(a)); }

double sum_value(const Tensor &a) {
  double s = 0.0;
  for (double v : a.data()) s += v;
  return s;
}

Tensor sum_axis(const Tensor &a, int axis) {
  if (axis < 0 || axis >= a.rank())
    throw IndexOutOfRange("sum_axis axis " + std::to_string(axis));
  Shape out_shape;
  for (int i = 0; i < a.rank(); ++i) {
    if (i != axis) out_shape.push_back(a.dim(i));
  }
  int64_t outer = 1, inner = 1;
  for (int i = 0; i < axis; ++i) outer *= a.dim(i);
  for (int i = axis + 1; i < a.rank(); ++i) inner *= a.dim(i);
  int64_t mid = a.dim(axis);
  std::vector<double> out(static_cast<size_t>(outer * inner), 0.0);
  auto ad = a.data();
  for (int64_t o = 0; o < outer; ++o) {
    for (int64_t m = 0; m < mid; ++m) {
      const double *src = ad.data() + (o * mid + m) * inner;
      double *dst = out.data() + o * inner;
      for (int64_t i = 0; i < inner; ++i) dst[i] += src[i];
    }
  }
  return Tensor(std::move(out_shape), std::move(out));
}

Tensor reshape(const Tensor &a, Shape shape) {
  if (shape_numel(shape) != a.numel())
    throw ShapeMismatch("reshape " + shape_to_string(a.shape()) + " -> " +
                        shape_to_string(shape));
  return Tensor(std::move(shape), std::vector<double>(a.data().begin(), a.data().end()));
}

Tensor transpose(const Tensor &a) {
  auto m = as_matrix(a);
  RowMajor t = m.transpose();
  return Tensor({a.dim(1), a.dim(0)},
                std::vector<double>(t.data(), t.data() + t.size()));
}

Tensor matmul(const Tensor &a, const Tensor &b) {
  if (a.rank() != 2 || b.rank() != 2)
    throw ShapeMismatch("matmul wants rank-2 operands");
  if (a.dim(1) != b.dim(0))
    throw ShapeMismatch("matmul " + shape_to_string(a.shape()) + " x " +
                        shape_to_string(b.shape()));
  auto ma = as_matrix(a);
  auto mb = as_matrix(b);
  RowMajor c = ma * mb;
  return Tensor({a.dim(0), b.dim(1)},
                std::vector<double>(c.data(), c.data() + c.size()));
}

Tensor concat(const std::vector<Tensor> &parts, int axis) {
  if (parts.empty()) throw ShapeMismatch("concat of nothing");
  int rank = parts[0].rank();
  if (axis < 0 || axis >= rank) throw IndexOutOfRange("concat axis");
  Shape out_shape = parts[0].shape();
  out_shape[static_cast<size_t>(axis)] = 0;
  for (const Tensor &p : parts) {
    if (p.rank() != rank) throw ShapeMismatch("concat rank mismatch");
    for (int i = 0; i < rank; ++i) {
      if (i != axis && p.dim(i) != parts[0].dim(i))
        throw ShapeMismatch("concat shape mismatch on axis " + std::to_string(i));
    }
    out_shape[static_cast<size_t>(axis)] += p.dim(axis);
  }
  int64_t outer = 1, inner = 1;
  for (int i = 0; i < axis; ++i) outer *= out_shape[static_cast<size_t>(i)];
  for (int i = axis + 1; i < rank; ++i) inner *= out_shape[static_cast<size_t>(i)];
  std::vector<double> out(static_cast<size_t>(shape_numel(out_shape)));
  int64_t out_mid = out_shape[static_cast<size_t>(axis)];
  int64_t offset = 0;
  for (const Tensor &p : parts) {
    int64_t mid = p.dim(axis);
    auto pd = p.data();
    for (int64_t o = 0; o < outer; ++o) {
      const double *src = pd.data() + o * mid * inner;
      double *dst = out.data() + (o * out_mid + offset) * inner;
      std::copy(src, src + mid * inner, dst);
    }
    offset += mid;
  }
  return Tensor(std::move(out_shape), std::move(out));
}

Tensor slice(const Tensor &a, const std::vector<int64_t> &begin,
             const std::vector<int64_t> &size) {
  if (static_cast<int>(begin.size()) != a.rank() ||
      static_cast<int>(size.size()) != a.rank())
    throw ShapeMismatch("slice spec rank mismatch");
  Shape out_shape(size.begin(), size.end());
  for (int i = 0; i < a.rank(); ++i) {
    if (begin[static_cast<size_t>(i)] < 0 || size[static_cast<size_t>(i)] < 0 ||
        begin[static_cast<size_t>(i)] + size[static_cast<size_t>(i)] > a.dim(i))
      throw IndexOutOfRange("slice out of bounds on axis " + std::to_string(i));
  }
  std::vector<double> out(static_cast<size_t>(shape_numel(out_shape)));
  int rank = a.rank();
  std::vector<int64_t> in_strides(static_cast<size_t>(rank), 1);
  for (int i = rank - 2; i >= 0; --i)
    in_strides[static_cast<size_t>(i)] = in_strides[static_cast<size_t>(i + 1)] * a.dim(i + 1);
  std::vector<int64_t> idx(static_cast<size_t>(rank), 0);
  auto ad = a.data();
  int64_t n = shape_numel(out_shape);
  for (int64_t flat = 0; flat < n; ++flat) {
    int64_t src = 0;
    for (int k = 0; k < rank; ++k)
      src += (begin[static_cast<size_t>(k)] + idx[static_cast<size_t>(k)]) * in_strides[static_cast<size_t>(k)];
    out[static_cast<size_t>(flat)] = ad[src];
    for (int k = rank - 1; k >= 0; --k) {
      if (++idx[static_cast<size_t>(k)] < out_shape[static_cast<size_t>(k)]) break;
      idx[static_cast<size_t>(k)] = 0;
    }
  }
  return Tensor(std::move(out_shape), std::move(out));
}

Tensor take_rows(const Tensor &a, const std::vector<int64_t> &indices) {
  if (a.rank() < 1) throw ShapeMismatch("take_rows on rank-0");
  int64_t row = a.numel() / std::max<int64_t>(a.dim(0), 1);
  Shape out_shape = a.shape();
  out_shape[0] = static_cast<int64_t>(indices.size());
  std::vector<double> out(static_cast<size_t>(indices.size()) * static_cast<size_t>(row));
  auto ad = a.data();
  for (size_t i = 0; i < indices.size(); ++i) {
    int64_t r = indices[i];
    if (r < 0 || r >= a.dim(0)) throw IndexOutOfRange("take_rows index " + std::to_string(r));
    std::copy(ad.data() + r * row, ad.data() + (r + 1) * row, out.data() + static_cast<int64_t>(i) * row);
  }
  return Tensor(std::move(out_shape), std::move(out));
}

}  // namespace ops
}  // namespace msdgp
