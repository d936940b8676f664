// tests/test_core_math.cc

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

#include <cmath>

#include "msdgp/error.h"
#include "msdgp/linalg.h"
#include "msdgp/rng.h"
#include "msdgp/tape.h"
#include "msdgp/tensor.h"
#include "msdgp/tensor_ops.h"
#include "support/oracles.h"

using namespace msdgp;
using msdgp::testing::gradcheck;

TEST_CASE("tensor shape invariants") {
  Tensor t({2, 3}, {1, 2, 3, 4, 5, 6});
  CHECK(t.numel() == 6);
  CHECK(t.at({1, 2}) == 6.0);
  CHECK_THROWS_AS(Tensor({2, 2}, {1.0, 2.0}), ShapeMismatch);
  Tensor empty({0}, {});
  CHECK(empty.numel() == 0);
  Tensor scalar = Tensor::scalar(4.0);
  CHECK(scalar.rank() == 0);
  CHECK(scalar.item() == 4.0);
}

TEST_CASE("broadcasting add and sum_to round-trip") {
  Tensor a({2, 3}, {1, 2, 3, 4, 5, 6});
  Tensor row({1, 3}, {10, 20, 30});
  Tensor sum = ops::add(a, row);
  CHECK(sum.at({1, 0}) == 14.0);
  Tensor back = ops::sum_to(ops::broadcast_to(row, {2, 3}), {1, 3});
  CHECK(back.at({0, 1}) == 40.0);
  Tensor s = ops::sum_axis(a, 1);
  CHECK(s.dim(0) == 2);
  CHECK(s[0] == 6.0);
  CHECK(s[1] == 15.0);
}

TEST_CASE("philox known-answer vectors") {
  auto zero = philox4x32({0, 0, 0, 0}, {0, 0});
  CHECK(zero[0] == 0x6627e8d5u);
  CHECK(zero[1] == 0xe169c58du);
  CHECK(zero[2] == 0xbc57ac4cu);
  CHECK(zero[3] == 0x9b00dbd8u);
  auto ones = philox4x32({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                         {0xffffffffu, 0xffffffffu});
  CHECK(ones[0] == 0x408f276du);
  CHECK(ones[1] == 0x41c83b0eu);
  CHECK(ones[2] == 0xa20bc7c6u);
  CHECK(ones[3] == 0x6d5451fdu);
}

TEST_CASE("gaussian_sample determinism and degenerate shape") {
  RandomStream a(42), b(42);
  Tensor ta = gaussian_sample({2, 2}, a);
  Tensor tb = gaussian_sample({2, 2}, b);
  CHECK(ta.same_bits(tb));
  RandomStream c(43);
  CHECK(!gaussian_sample({2, 2}, c).same_bits(ta));
  RandomStream d(1);
  Tensor empty = gaussian_sample({0}, d);
  CHECK(empty.numel() == 0);
}

TEST_CASE("gaussian_sample moments over 1e6 draws") {
  RandomStream rng(7);
  const int64_t n = 1000000;
  double sum = 0.0, sumsq = 0.0;
  for (int64_t i = 0; i < n; ++i) {
    double v = rng.next_normal();
    sum += v;
    sumsq += v * v;
  }
  double mean = sum / n;
  double var = sumsq / n - mean * mean;
  CHECK(std::abs(mean) < 0.01);
  CHECK(std::abs(var - 1.0) < 0.02);
}

TEST_CASE("stream splitting is reproducible and position-independent") {
  RandomStream parent(99);
  parent.next_u64();
  RandomStream child1 = parent.split(3);
  RandomStream parent2(99);
  RandomStream child2 = parent2.split(3);
  CHECK(child1.next_u64() == child2.next_u64());
  CHECK(RandomStream(99).split(3).next_u64() != RandomStream(99).split(4).next_u64());
}

TEST_CASE("cholesky identity") {
  Tensor l = cholesky(Tensor::eye(3));
  CHECK(l.same_bits(Tensor::eye(3)));
}

TEST_CASE("cholesky 2x2 closed form") {
  // [[4,2],[2,3]] factors to [[2,0],[1,sqrt(2)]]; check L L^T = A directly.
  Tensor a({2, 2}, {4, 2, 2, 3});
  Tensor l = cholesky(a);
  CHECK(l.at({0, 0}) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(l.at({0, 1}) == 0.0);
  CHECK(l.at({1, 0}) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(l.at({1, 1}) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  Tensor rec = ops::matmul(l, ops::transpose(l));
  for (int64_t i = 0; i < 2; ++i)
    for (int64_t j = 0; j < 2; ++j)
      CHECK(rec.at({i, j}) == doctest::Approx(a.at({i, j})).epsilon(1e-12));
}

TEST_CASE("cholesky rejects indefinite input") {
  Tensor a({2, 2}, {1, 2, 2, 1});  // eigenvalues 3 and -1
  CHECK_THROWS_AS(cholesky(a), NotPositiveDefinite);
}

TEST_CASE("cholesky reconstruction on random SPD up to dim 64") {
  RandomStream rng(5);
  for (int64_t dim : {1, 2, 7, 31, 64}) {
    Tensor b = gaussian_sample({dim, dim}, rng);
    Tensor a = ops::add(ops::matmul(b, ops::transpose(b)),
                        ops::scale(Tensor::eye(dim), 1e-3));
    Tensor l = cholesky(a);
    Tensor rec = ops::matmul(l, ops::transpose(l));
    double num = 0.0, den = 0.0;
    for (int64_t i = 0; i < dim * dim; ++i) {
      double diff = rec[i] - a[i];
      num += diff * diff;
      den += a[i] * a[i];
    }
    CHECK(std::sqrt(num / den) < 1e-8);
  }
}

TEST_CASE("triangular solve round-trip within 1e-10") {
  RandomStream rng(6);
  for (int64_t dim : {1, 3, 17, 64}) {
    Tensor b = gaussian_sample({dim, dim}, rng);
    Tensor a = ops::add(ops::matmul(b, ops::transpose(b)),
                        ops::scale(Tensor::eye(dim), 1e-2));
    Tensor l = cholesky(a);
    Tensor rhs = gaussian_sample({dim, 3}, rng);
    Tensor x = triangular_solve(l, rhs, false);
    Tensor back = ops::matmul(l, x);
    for (int64_t i = 0; i < back.numel(); ++i)
      CHECK(back[i] == doctest::Approx(rhs[i]).epsilon(1e-10));
    Tensor xt = triangular_solve(l, rhs, true);
    Tensor backt = ops::matmul(ops::transpose(l), xt);
    for (int64_t i = 0; i < backt.numel(); ++i)
      CHECK(backt[i] == doctest::Approx(rhs[i]).epsilon(1e-10));
  }
}

TEST_CASE("grad of x*x at x=3 is 6") {
  Tape tape;
  Var x = tape.leaf(Tensor::scalar(3.0).with_requires_grad(true));
  Var y = tape.mul(x, x);
  tape.backward(y);
  CHECK(tape.gradient(x).item() == doctest::Approx(6.0).epsilon(1e-12));
}

TEST_CASE("grad of constant output is zero") {
  Tape tape;
  Var x = tape.leaf(Tensor({2}, {1.0, 2.0}).with_requires_grad(true));
  Var c = tape.constant_scalar(5.0);
  tape.backward(c);
  Tensor g = tape.gradient(x);
  CHECK(g.shape() == Shape{2});
  CHECK(g[0] == 0.0);
  CHECK(g[1] == 0.0);
  (void)x;
}

TEST_CASE("grad of sum(cholesky(x*I2)) matches finite differences") {
  auto build = [](Tape &tape, const std::vector<Var> &params) {
    Var scaled = tape.mul(tape.broadcast_to(tape.reshape(params[0], {1, 1}), {2, 2}),
                          tape.constant(Tensor::eye(2)));
    Var shifted = tape.add(scaled, tape.constant(ops::scale(Tensor::eye(2), 1e-8)));
    return tape.sum(tape.cholesky(shifted));
  };
  auto result = gradcheck(build, {Tensor::scalar(4.0)}, {"x"});
  CHECK(result.max_rel_err < 1e-4);
}

TEST_CASE("every primitive passes finite-difference checks") {
  RandomStream rng(11);
  // Elementwise chain: exp, log, sqrt, mul, div, add, sub, neg.
  auto elementwise = [](Tape &t, const std::vector<Var> &p) {
    Var a = p[0], b = p[1];
    Var mix = t.div(t.mul(t.exp(a), t.sqrt(t.exp(b))), t.add(t.exp(b), t.constant_scalar(2.0)));
    Var c = t.sub(mix, t.neg(t.log(t.exp(a))));
    return t.sum(c);
  };
  Tensor a = gaussian_sample({3, 2}, rng);
  Tensor b = gaussian_sample({3, 2}, rng);
  CHECK(gradcheck(elementwise, {a, b}, {"a", "b"}).max_rel_err < 1e-4);

  // matmul + transpose + broadcast + sum_axis + reshape + slice + concat.
  auto structural = [](Tape &t, const std::vector<Var> &p) {
    Var m = t.matmul(p[0], t.transpose(p[1]));      // 3x3
    Var row = t.sum_axis(m, 0);                     // [3]
    Var col = t.reshape(row, {3, 1});
    Var wide = t.concat({m, col}, 1);               // 3x4
    Var part = t.slice(wide, {1, 1}, {2, 3});
    Var scaled = t.mul(part, t.broadcast_to(t.constant_scalar(0.5), {2, 3}));
    return t.sum(scaled);
  };
  Tensor m1 = gaussian_sample({3, 2}, rng);
  Tensor m2 = gaussian_sample({3, 2}, rng);
  CHECK(gradcheck(structural, {m1, m2}, {"m1", "m2"}).max_rel_err < 1e-4);

  // relu and clamp_min away from their kinks.
  auto kinky = [](Tape &t, const std::vector<Var> &p) {
    return t.sum(t.add(t.relu(p[0]), t.clamp_min(p[0], 1e-3)));
  };
  Tensor far = Tensor({4}, {0.5, -0.7, 1.3, -2.1});
  CHECK(gradcheck(kinky, {far}, {"x"}).max_rel_err < 1e-4);

  // arccos with clamped argument, away from |c| = 1.
  auto arc = [](Tape &t, const std::vector<Var> &p) { return t.sum(t.arccos(p[0])); };
  Tensor inside = Tensor({3}, {-0.8, 0.1, 0.6});
  CHECK(gradcheck(arc, {inside}, {"c"}).max_rel_err < 1e-4);

  // cholesky + triangular_solve in both orientations.
  auto chol_solve = [](Tape &t, const std::vector<Var> &p) {
    Var spd = t.add(t.matmul(p[0], t.transpose(p[0])),
                    t.constant(ops::scale(Tensor::eye(3), 0.5)));
    Var l = t.cholesky(spd);
    Var x = t.triangular_solve(l, p[1], false);
    Var y = t.triangular_solve(l, x, true);
    return t.sum(t.mul(y, y));
  };
  Tensor root = gaussian_sample({3, 3}, rng);
  Tensor rhs = gaussian_sample({3, 2}, rng);
  CHECK(gradcheck(chol_solve, {root, rhs}, {"root", "rhs"}).max_rel_err < 1e-4);
}

TEST_CASE("tape replays in reverse order with repeated-use accumulation") {
  Tape tape;
  Var x = tape.leaf(Tensor::scalar(2.0).with_requires_grad(true));
  Var y = tape.mul(x, x);      // x^2
  Var z = tape.mul(y, x);      // x^3
  Var w = tape.add(z, y);      // x^3 + x^2
  tape.backward(w);
  // d/dx = 3x^2 + 2x = 16 at x=2.
  CHECK(tape.gradient(x).item() == doctest::Approx(16.0).epsilon(1e-12));
}
