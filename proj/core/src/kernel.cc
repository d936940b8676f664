// core/src/kernel.cc

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

#include "msdgp/kernel.h"

#include <algorithm>
#include <cmath>

#include "msdgp/error.h"
#include "msdgp/tensor_ops.h"

namespace msdgp {

namespace {

void check_inputs(const Tensor &x, const Tensor &y) {
  if (x.rank() != 2 || y.rank() != 2)
    throw ShapeMismatch("arccos_gram wants rank-2 inputs");
  if (x.dim(1) != y.dim(1) || x.dim(1) < 1)
    throw ShapeMismatch("arccos_gram feature dims " + shape_to_string(x.shape()) +
                        " vs " + shape_to_string(y.shape()));
}

std::vector<double> row_sumsq(const Tensor &x) {
  int64_t n = x.dim(0), d = x.dim(1);
  std::vector<double> s(static_cast<size_t>(n), 0.0);
  auto xd = x.data();
  for (int64_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (int64_t k = 0; k < d; ++k) {
      double v = xd[i * d + k];
      acc += v * v;
    }
    s[static_cast<size_t>(i)] = acc;
  }
  return s;
}

// Shared forward: fills the Gram matrix and, when grads is non-null, the
// per-entry quantities the adjoint needs.
struct GramScratch {
  std::vector<double> theta;      // clamped angle
  std::vector<double> sin_theta;  // sqrt(1 - c^2)
  std::vector<double> nxny;       // sqrt(sx * sy)
};

Tensor gram_forward(const Tensor &x, const Tensor &y, double variance,
                    const std::vector<double> &sx, const std::vector<double> &sy,
                    GramScratch *scratch) {
  int64_t n = x.dim(0), m = y.dim(0), d = x.dim(1);
  auto xd = x.data();
  auto yd = y.data();
  std::vector<double> out(static_cast<size_t>(n * m), 0.0);
  if (scratch != nullptr) {
    scratch->theta.assign(static_cast<size_t>(n * m), 0.0);
    scratch->sin_theta.assign(static_cast<size_t>(n * m), 0.0);
    scratch->nxny.assign(static_cast<size_t>(n * m), 0.0);
  }
  for (int64_t i = 0; i < n; ++i) {
    double sxi = sx[static_cast<size_t>(i)];
    for (int64_t j = 0; j < m; ++j) {
      double syj = sy[static_cast<size_t>(j)];
      size_t ij = static_cast<size_t>(i * m + j);
      if (sxi == 0.0 || syj == 0.0) continue;  // zero-norm convention
      double dot = 0.0;
      for (int64_t k = 0; k < d; ++k) dot += xd[i * d + k] * yd[j * d + k];
      double nxny = std::sqrt(sxi * syj);
      double c = std::clamp(dot / nxny, -1.0, 1.0);
      double theta = std::acos(c);
      double sin_theta = std::sqrt(std::max(0.0, 1.0 - c * c));
      double j_val = sin_theta + (M_PI - theta) * c;
      out[ij] = variance * (nxny * (j_val / M_PI));
      if (scratch != nullptr) {
        scratch->theta[ij] = theta;
        scratch->sin_theta[ij] = sin_theta;
        scratch->nxny[ij] = nxny;
      }
    }
  }
  return Tensor({n, m}, std::move(out));
}

}  // namespace

double ArcCosParams::variance() const { return std::exp(log_variance); }

ArcCosParams ArcCosParams::from_variance(double variance) {
  if (!(variance > 0.0))
    throw InvalidConfig("kernel variance must be positive, got " +
                        std::to_string(variance));
  return ArcCosParams{std::log(variance)};
}

Tensor arccos_gram(const Tensor &x, const Tensor &y, const ArcCosParams &params) {
  check_inputs(x, y);
  auto sx = row_sumsq(x);
  auto sy = row_sumsq(y);
  return gram_forward(x, y, params.variance(), sx, sy, nullptr);
}

Tensor kernel_diag(const Tensor &x, const ArcCosParams &params) {
  if (x.rank() != 2) throw ShapeMismatch("kernel_diag wants a rank-2 input");
  auto s = row_sumsq(x);
  double v = params.variance();
  for (double &e : s) e = v * e;
  return Tensor({x.dim(0)}, std::move(s));
}

Var arccos_gram(Tape &tape, Var x, Var y, Var log_variance) {
  const Tensor vx = tape.value(x);
  const Tensor vy = tape.value(y);
  check_inputs(vx, vy);
  const double variance = std::exp(tape.value(log_variance).item());
  auto sx = row_sumsq(vx);
  auto sy = row_sumsq(vy);
  Tensor out = gram_forward(vx, vy, variance, sx, sy, nullptr);
  auto backward = [vx, vy, variance, sx, sy, out](const Tensor &adj,
                                                  const Tape::Accumulator &acc) {
    GramScratch scratch;
    gram_forward(vx, vy, variance, sx, sy, &scratch);
    int64_t n = vx.dim(0), m = vy.dim(0), d = vx.dim(1);
    auto xd = vx.data();
    auto yd = vy.data();
    auto ad = adj.data();
    std::vector<double> x_bar(static_cast<size_t>(n * d), 0.0);
    std::vector<double> y_bar(static_cast<size_t>(m * d), 0.0);
    double logv_bar = 0.0;
    for (int64_t i = 0; i < n; ++i) {
      double sxi = sx[static_cast<size_t>(i)];
      for (int64_t j = 0; j < m; ++j) {
        size_t ij = static_cast<size_t>(i * m + j);
        double a = ad[ij];
        logv_bar += a * out.data()[ij];
        if (a == 0.0 || sxi == 0.0 || sy[static_cast<size_t>(j)] == 0.0) continue;
        double theta = scratch.theta[ij];
        double sin_theta = scratch.sin_theta[ij];
        double nxny = scratch.nxny[ij];
        // dk/d(dot) = v (pi - t) / pi; dk/d(x_i) through the norm is
        // v * nxny * sin t / (pi * sx_i) * x_i, and symmetrically for y.
        double g_dot = a * variance * (M_PI - theta) / M_PI;
        double g_nx = a * variance * nxny * sin_theta / (M_PI * sxi);
        double g_ny = a * variance * nxny * sin_theta / (M_PI * sy[static_cast<size_t>(j)]);
        for (int64_t k = 0; k < d; ++k) {
          x_bar[static_cast<size_t>(i * d + k)] += g_dot * yd[j * d + k] + g_nx * xd[i * d + k];
          y_bar[static_cast<size_t>(j * d + k)] += g_dot * xd[i * d + k] + g_ny * yd[j * d + k];
        }
      }
    }
    acc(0, Tensor({n, d}, std::move(x_bar)));
    acc(1, Tensor({m, d}, std::move(y_bar)));
    acc(2, Tensor::scalar(logv_bar));
  };
  return tape.custom({x, y, log_variance}, std::move(out), std::move(backward));
}

Var kernel_diag(Tape &tape, Var x, Var log_variance) {
  // v * rowsumsq(x); composed so it matches the fused Gram diagonal bitwise.
  Var sumsq = tape.sum_axis(tape.mul(x, x), 1);
  Var v = tape.exp(log_variance);
  return tape.mul(tape.broadcast_to(tape.reshape(v, Shape{1}), tape.value(sumsq).shape()), sumsq);
}

}  // namespace msdgp
