// core/src/linalg.cc

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

#include "msdgp/linalg.h"

#include <Eigen/Dense>

#include <cmath>

#include "msdgp/error.h"

namespace msdgp {

namespace {
using RowMajor =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
}  // namespace

Tensor cholesky(const Tensor &a) {
  if (a.rank() != 2 || a.dim(0) != a.dim(1))
    throw ShapeMismatch("cholesky wants a square matrix, got " +
                        shape_to_string(a.shape()));
  int64_t n = a.dim(0);
  if (n < 1) throw ShapeMismatch("cholesky of empty matrix");
  auto ad = a.data();
  double scale = 0.0;
  for (double v : ad) scale = std::max(scale, std::abs(v));
  for (int64_t i = 0; i < n; ++i) {
    for (int64_t j = i + 1; j < n; ++j) {
      double diff = std::abs(ad[i * n + j] - ad[j * n + i]);
      if (diff > 1e-10 * std::max(1.0, scale))
        throw ShapeMismatch("cholesky input not symmetric (|A-A^T| = " +
                            std::to_string(diff) + ")");
    }
  }
  // Factor the symmetrized matrix so gradients of both triangles agree.
  std::vector<double> l(static_cast<size_t>(n * n), 0.0);
  for (int64_t j = 0; j < n; ++j) {
    double diag = ad[j * n + j];
    for (int64_t k = 0; k < j; ++k) diag -= l[static_cast<size_t>(j * n + k)] * l[static_cast<size_t>(j * n + k)];
    if (diag <= 0.0 || !std::isfinite(diag))
      throw NotPositiveDefinite("pivot " + std::to_string(diag) + " at column " +
                                std::to_string(j));
    double pivot = std::sqrt(diag);
    l[static_cast<size_t>(j * n + j)] = pivot;
    for (int64_t i = j + 1; i < n; ++i) {
      double s = 0.5 * (ad[i * n + j] + ad[j * n + i]);
      for (int64_t k = 0; k < j; ++k) s -= l[static_cast<size_t>(i * n + k)] * l[static_cast<size_t>(j * n + k)];
      l[static_cast<size_t>(i * n + j)] = s / pivot;
    }
  }
  return Tensor({n, n}, std::move(l));
}

Tensor triangular_solve(const Tensor &l, const Tensor &b, bool transpose_l) {
  if (l.rank() != 2 || l.dim(0) != l.dim(1))
    throw ShapeMismatch("triangular_solve wants a square L");
  if (b.rank() != 2 || b.dim(0) != l.dim(0))
    throw ShapeMismatch("triangular_solve dimension mismatch " +
                        shape_to_string(l.shape()) + " vs " +
                        shape_to_string(b.shape()));
  Eigen::Map<const RowMajor> ml(l.data().data(), l.dim(0), l.dim(1));
  Eigen::Map<const RowMajor> mb(b.data().data(), b.dim(0), b.dim(1));
  RowMajor x;
  if (transpose_l) {
    x = ml.transpose().triangularView<Eigen::Upper>().solve(mb);
  } else {
    x = ml.triangularView<Eigen::Lower>().solve(mb);
  }
  return Tensor({b.dim(0), b.dim(1)},
                std::vector<double>(x.data(), x.data() + x.size()));
}

}  // namespace msdgp
