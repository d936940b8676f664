// tests/test_kernel.cc

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

#include "doctest.h"

#include <Eigen/Dense>

#include <cmath>

#include "msdgp/kernel.h"
#include "msdgp/rng.h"
#include "msdgp/tensor_ops.h"
#include "support/oracles.h"

using namespace msdgp;
using msdgp::testing::gradcheck;

TEST_CASE("arccos gram closed-form values") {
  ArcCosParams unit = ArcCosParams::from_variance(1.0);
  Tensor x({1, 2}, {1, 0});

  // Same vector: theta = 0 so k = |x|^2.
  CHECK(arccos_gram(x, x, unit).item() == doctest::Approx(1.0).epsilon(1e-15));

  // Orthogonal: theta = pi/2, k = (1/pi) |x||y| sin(pi/2) = 1/pi.
  Tensor y({1, 2}, {0, 1});
  CHECK(arccos_gram(x, y, unit).item() == doctest::Approx(1.0 / M_PI).epsilon(1e-12));

  // Antipodal: theta = pi annihilates both terms.
  Tensor neg({1, 2}, {-1, 0});
  CHECK(arccos_gram(x, neg, unit).item() == 0.0);
}

TEST_CASE("kernel_diag matches sigma^2 |x|^2 and the gram diagonal bitwise") {
  ArcCosParams unit = ArcCosParams::from_variance(1.0);
  Tensor x({2, 2}, {1, 0, 0, 2});
  Tensor diag = kernel_diag(x, unit);
  CHECK(diag[0] == 1.0);
  CHECK(diag[1] == 4.0);

  ArcCosParams two = ArcCosParams::from_variance(2.0);
  Tensor v({1, 2}, {3, 4});
  CHECK(kernel_diag(v, two).item() == doctest::Approx(50.0).epsilon(1e-15));

  RandomStream rng(3);
  Tensor r = gaussian_sample({6, 4}, rng);
  Tensor gram = arccos_gram(r, r, two);
  Tensor d = kernel_diag(r, two);
  for (int64_t i = 0; i < 6; ++i) {
    CHECK(gram.at({i, i}) == d[i]);  // bitwise
  }
}

TEST_CASE("zero-norm rows give zero kernel and zero gradient") {
  ArcCosParams unit = ArcCosParams::from_variance(1.0);
  Tensor x({2, 2}, {0, 0, 1, 1});
  Tensor g = arccos_gram(x, x, unit);
  CHECK(g.at({0, 0}) == 0.0);
  CHECK(g.at({0, 1}) == 0.0);
  CHECK(g.at({1, 0}) == 0.0);
  CHECK(kernel_diag(x, unit)[0] == 0.0);

  Tape tape;
  Var xv = tape.leaf(x.with_requires_grad(true));
  Var logv = tape.leaf(Tensor::scalar(0.0).with_requires_grad(true));
  tape.backward(tape.sum(arccos_gram(tape, xv, xv, logv)));
  Tensor grad_x = tape.gradient(xv);
  CHECK(grad_x.at({0, 0}) == 0.0);
  CHECK(grad_x.at({0, 1}) == 0.0);
}

TEST_CASE("gram is symmetric and PSD for random inputs") {
  RandomStream rng(17);
  for (int rep = 0; rep < 5; ++rep) {
    int64_t n = 5 + static_cast<int64_t>(rng.next_below(46));
    int64_t d = 1 + static_cast<int64_t>(rng.next_below(10));
    Tensor x = gaussian_sample({n, d}, rng);
    ArcCosParams params = ArcCosParams::from_variance(0.5 + rng.next_double());
    Tensor g = arccos_gram(x, x, params);
    for (int64_t i = 0; i < n; ++i)
      for (int64_t j = 0; j < i; ++j)
        CHECK(g.at({i, j}) == g.at({j, i}));  // bitwise symmetry
    Eigen::MatrixXd m(n, n);
    for (int64_t i = 0; i < n; ++i)
      for (int64_t j = 0; j < n; ++j) m(i, j) = g.at({i, j});
    m += 1e-10 * Eigen::MatrixXd::Identity(n, n);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    CHECK(es.eigenvalues().minCoeff() >= -1e-8);
  }
}

TEST_CASE("variance scaling is exact for power-of-two factors") {
  RandomStream rng(23);
  Tensor x = gaussian_sample({4, 3}, rng);
  Tensor y = gaussian_sample({5, 3}, rng);
  ArcCosParams base = ArcCosParams::from_variance(0.75);
  Tensor g1 = arccos_gram(x, y, base);
  for (double c : {2.0, 0.5, 4.0}) {
    ArcCosParams scaled{base.log_variance + std::log(c)};
    // exp(log v + log c) must reproduce c*v exactly for these c.
    CHECK(scaled.variance() == c * base.variance());
    Tensor g2 = arccos_gram(x, y, scaled);
    for (int64_t i = 0; i < g1.numel(); ++i) CHECK(g2[i] == c * g1[i]);
  }
}

TEST_CASE("gram gradients pass finite differences, including near-parallel") {
  RandomStream rng(29);
  auto build = [](Tape &t, const std::vector<Var> &p) {
    Var g = arccos_gram(t, p[0], p[1], p[2]);
    // Weighted sum exercises off-diagonal adjoints unevenly.
    Tensor w({3, 2}, {1.0, -0.3, 0.7, 2.0, -1.1, 0.4});
    return t.sum(t.mul(g, t.constant(w)));
  };
  Tensor x = gaussian_sample({3, 3}, rng);
  Tensor y = gaussian_sample({2, 3}, rng);
  CHECK(gradcheck(build, {x, y, Tensor::scalar(0.3)}, {"x", "y", "logv"}).max_rel_err <
        1e-4);

  // Rows at cos(theta) = 1 - 1e-7: the fused adjoint stays smooth there.
  double c = 1.0 - 1e-7;
  double s = std::sqrt(1.0 - c * c);
  Tensor near_x({1, 2}, {1.0, 0.0});
  Tensor near_y({1, 2}, {c, s});
  auto near_build = [](Tape &t, const std::vector<Var> &p) {
    return t.sum(arccos_gram(t, p[0], p[1], p[2]));
  };
  CHECK(gradcheck(near_build, {near_x, near_y, Tensor::scalar(0.0)},
                  {"x", "y", "logv"})
            .max_rel_err < 1e-4);

  // Gram of a matrix with itself (diagonal hits theta = 0 exactly).
  auto self_build = [](Tape &t, const std::vector<Var> &p) {
    return t.sum(arccos_gram(t, p[0], p[0], p[1]));
  };
  Tensor z = gaussian_sample({3, 2}, rng);
  CHECK(gradcheck(self_build, {z, Tensor::scalar(-0.2)}, {"z", "logv"}).max_rel_err <
        1e-4);
}

TEST_CASE("kernel_diag gradients") {
  RandomStream rng(31);
  auto build = [](Tape &t, const std::vector<Var> &p) {
    return t.sum(kernel_diag(t, p[0], p[1]));
  };
  Tensor x = gaussian_sample({4, 3}, rng);
  CHECK(gradcheck(build, {x, Tensor::scalar(0.1)}, {"x", "logv"}).max_rel_err < 1e-4);
}
