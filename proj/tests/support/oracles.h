// tests/support/oracles.h

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

// Test-side oracles, independent of the tape/GP implementation paths they
// check: central finite differences, dense exact-GP regression, Monte Carlo
// KL estimates, and small clustering scores.

#ifndef MSDGP_TESTS_SUPPORT_ORACLES_H_
#define MSDGP_TESTS_SUPPORT_ORACLES_H_

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "msdgp/linalg.h"
#include "msdgp/rng.h"
#include "msdgp/tape.h"
#include "msdgp/tensor.h"

namespace msdgp {
namespace testing {

inline double rel_err(double a, double b) {
  return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

// Scalar function of a parameter list, evaluated fresh per call so finite
// differences see frozen noise (the callee reseeds its own rng).
using ScalarFn = std::function<double(const std::vector<Tensor> &)>;

struct GradCheckResult {
  double max_rel_err = 0.0;
  std::string worst_param;
  int64_t worst_index = -1;
  double analytic = 0.0, numeric = 0.0;
};

// Central finite differences with absolute step 1e-5 against the supplied
// analytic gradients.
inline GradCheckResult finite_difference_check(
    const ScalarFn &f, std::vector<Tensor> params,
    const std::vector<Tensor> &analytic,
    const std::vector<std::string> &names, double step = 1e-5) {
  GradCheckResult result;
  for (size_t p = 0; p < params.size(); ++p) {
    int64_t n = params[p].numel();
    for (int64_t i = 0; i < n; ++i) {
      std::vector<double> base(params[p].data().begin(), params[p].data().end());
      std::vector<double> plus = base, minus = base;
      plus[static_cast<size_t>(i)] += step;
      minus[static_cast<size_t>(i)] -= step;
      std::vector<Tensor> pp = params, pm = params;
      pp[p] = Tensor(params[p].shape(), std::move(plus)).with_requires_grad(true);
      pm[p] = Tensor(params[p].shape(), std::move(minus)).with_requires_grad(true);
      double fd = (f(pp) - f(pm)) / (2.0 * step);
      double an = analytic[p][i];
      double err = rel_err(an, fd);
      if (err > result.max_rel_err) {
        result.max_rel_err = err;
        result.worst_param = p < names.size() ? names[p] : std::to_string(p);
        result.worst_index = i;
        result.analytic = an;
        result.numeric = fd;
      }
    }
  }
  return result;
}

// Builds the graph with fresh leaves, returns value + gradients.
using GraphFn = std::function<Var(Tape &, const std::vector<Var> &)>;

inline double eval_graph(const GraphFn &build, const std::vector<Tensor> &params) {
  Tape tape;
  std::vector<Var> leaves;
  for (const Tensor &t : params) leaves.push_back(tape.leaf(t.with_requires_grad(true)));
  return tape.value(build(tape, leaves)).item();
}

inline GradCheckResult gradcheck(const GraphFn &build, std::vector<Tensor> params,
                                 const std::vector<std::string> &names = {},
                                 double step = 1e-5) {
  Tape tape;
  std::vector<Var> leaves;
  for (Tensor &t : params) {
    t = t.with_requires_grad(true);
    leaves.push_back(tape.leaf(t));
  }
  Var out = build(tape, leaves);
  std::vector<Tensor> analytic = grad(tape, out, leaves);
  ScalarFn f = [&build](const std::vector<Tensor> &p) { return eval_graph(build, p); };
  return finite_difference_check(f, params, analytic, names, step);
}

// Exact GP regression with kernel matrix K (n x n), cross-covariance K*
// (m x n), prior diag kdiag (m), noise variance sigma2: dense Cholesky
// solves, no inducing-point machinery.
struct ExactGp {
  Eigen::VectorXd mean;
  Eigen::VectorXd var;
  double log_marginal = 0.0;
};

inline ExactGp exact_gp_regression(const Eigen::MatrixXd &k,
                                   const Eigen::MatrixXd &k_star,
                                   const Eigen::VectorXd &kdiag_star,
                                   const Eigen::VectorXd &y, double sigma2) {
  int64_t n = k.rows();
  Eigen::MatrixXd a = k + sigma2 * Eigen::MatrixXd::Identity(n, n);
  Eigen::LLT<Eigen::MatrixXd> llt(a);
  Eigen::VectorXd alpha = llt.solve(y);
  ExactGp out;
  out.mean = k_star * alpha;
  Eigen::MatrixXd v = llt.matrixL().solve(k_star.transpose());
  out.var = kdiag_star - v.colwise().squaredNorm().transpose();
  double logdet = 0.0;
  for (int64_t i = 0; i < n; ++i) logdet += std::log(llt.matrixL()(i, i));
  out.log_marginal = -0.5 * y.dot(alpha) - logdet -
                     0.5 * static_cast<double>(n) * std::log(2.0 * M_PI);
  return out;
}

// Monte Carlo estimate of KL[N(m, S) || N(0, K)] by sampling q.
inline double mc_kl_gaussian(const Eigen::VectorXd &m, const Eigen::MatrixXd &s,
                             const Eigen::MatrixXd &k, int64_t n_samples,
                             uint64_t seed) {
  Eigen::LLT<Eigen::MatrixXd> ls(s);
  Eigen::LLT<Eigen::MatrixXd> lk(k);
  Eigen::MatrixXd ls_l = ls.matrixL();
  Eigen::MatrixXd lk_l = lk.matrixL();
  double logdet_s = 0.0, logdet_k = 0.0;
  int64_t d = m.size();
  for (int64_t i = 0; i < d; ++i) {
    logdet_s += std::log(ls_l(i, i));
    logdet_k += std::log(lk_l(i, i));
  }
  RandomStream rng(seed, 77);
  double acc = 0.0;
  Eigen::VectorXd eps(d);
  for (int64_t t = 0; t < n_samples; ++t) {
    for (int64_t i = 0; i < d; ++i) eps(i) = rng.next_normal();
    Eigen::VectorXd z = m + ls_l * eps;
    // log q(z) - log p(z)
    double quad_q = eps.squaredNorm();
    Eigen::VectorXd w = lk_l.triangularView<Eigen::Lower>().solve(z);
    double quad_p = w.squaredNorm();
    acc += -logdet_s - 0.5 * quad_q + logdet_k + 0.5 * quad_p;
  }
  return acc / static_cast<double>(n_samples);
}

// Mean silhouette score for points with labels (Euclidean).
inline double silhouette(const Tensor &points, const std::vector<int64_t> &labels) {
  int64_t n = points.dim(0), d = points.dim(1);
  auto dist = [&](int64_t i, int64_t j) {
    double s = 0.0;
    for (int64_t c = 0; c < d; ++c) {
      double diff = points.at({i, c}) - points.at({j, c});
      s += diff * diff;
    }
    return std::sqrt(s);
  };
  double total = 0.0;
  for (int64_t i = 0; i < n; ++i) {
    double a = 0.0;
    int64_t a_count = 0;
    double b = std::numeric_limits<double>::infinity();
    std::map<int64_t, std::pair<double, int64_t>> other;
    for (int64_t j = 0; j < n; ++j) {
      if (i == j) continue;
      if (labels[static_cast<size_t>(j)] == labels[static_cast<size_t>(i)]) {
        a += dist(i, j);
        ++a_count;
      } else {
        auto &entry = other[labels[static_cast<size_t>(j)]];
        entry.first += dist(i, j);
        entry.second += 1;
      }
    }
    if (a_count > 0) a /= static_cast<double>(a_count);
    for (const auto &[label, sum_count] : other)
      b = std::min(b, sum_count.first / static_cast<double>(sum_count.second));
    double s = (b - a) / std::max(a, b);
    total += s;
  }
  return total / static_cast<double>(n);
}

}  // namespace testing
}  // namespace msdgp

#endif  // MSDGP_TESTS_SUPPORT_ORACLES_H_
