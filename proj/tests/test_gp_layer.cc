// tests/test_gp_layer.cc

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

#include "msdgp/gp_layer.h"
#include "msdgp/kernel.h"
#include "msdgp/rng.h"
#include "msdgp/tensor_ops.h"
#include "support/oracles.h"

using namespace msdgp;

namespace {

// Raw factor storage for L = diag(d) with log-diagonal parameterization.
Tensor raw_chol_diag(int64_t d_out, int64_t m, double diag_value) {
  std::vector<double> raw(static_cast<size_t>(d_out * m * m), 0.0);
  for (int64_t d = 0; d < d_out; ++d)
    for (int64_t i = 0; i < m; ++i)
      raw[static_cast<size_t>((d * m + i) * m + i)] = std::log(diag_value);
  return Tensor({d_out, m, m}, std::move(raw));
}

GpLayer test_layer(int64_t d_in, int64_t d_out, int64_t m, uint64_t seed,
                   double chol_init = 0.3) {
  RandomStream rng(seed);
  GpLayer layer = GpLayer::create(d_in, d_out, m, MeanFunctionKind::kZero,
                                  chol_init, rng);
  // Random variational means so the posterior is nontrivial.
  layer.variational_mean =
      gaussian_sample({m, d_out}, rng).with_requires_grad(true);
  return layer;
}

}  // namespace

TEST_CASE("conditional mean is zero when m = 0 with zero mean function") {
  RandomStream rng(41);
  GpLayer layer = GpLayer::create(3, 2, 4, MeanFunctionKind::kZero, 1e-3, rng);
  Tensor h = gaussian_sample({5, 3}, rng);
  auto [mean, var] = conditional(layer, h);
  for (int64_t i = 0; i < mean.numel(); ++i) CHECK(mean[i] == 0.0);
  for (int64_t i = 0; i < var.numel(); ++i) CHECK(var[i] >= 0.0);
}

TEST_CASE("single inducing point closed form") {
  // M=1, Z=[1,0], m=[2], S ~ 0: mean at h = Z is k/k * 2 = 2 up to jitter.
  RandomStream rng(43);
  GpLayer layer = GpLayer::create(2, 1, 1, MeanFunctionKind::kZero, 1e-6, rng);
  layer.inducing_inputs = Tensor({1, 2}, {1, 0}).with_requires_grad(true);
  layer.variational_mean = Tensor({1, 1}, {2.0}).with_requires_grad(true);
  Tensor h({1, 2}, {1, 0});
  auto [mean, var] = conditional(layer, h);
  CHECK(mean.item() == doctest::Approx(2.0).epsilon(1e-5));
}

TEST_CASE("S = K_ZZ with m = 0 recovers the prior variance") {
  RandomStream rng(47);
  int64_t m = 6, d_in = 2;
  GpLayer layer = GpLayer::create(d_in, 1, m, MeanFunctionKind::kZero, 1.0, rng);
  // Set the factor to chol(K_ZZ + jitter) through the raw parameterization.
  ArcCosParams params{layer.kernel_log_variance.item()};
  Tensor k = arccos_gram(layer.inducing_inputs, layer.inducing_inputs, params);
  double diag_mean = 0.0;
  for (int64_t i = 0; i < m; ++i) diag_mean += k.at({i, i});
  diag_mean /= static_cast<double>(m);
  Tensor kj = ops::add(k, ops::scale(Tensor::eye(m), 1e-6 * diag_mean));
  Tensor l = cholesky(kj);
  std::vector<double> raw(static_cast<size_t>(m * m), 0.0);
  for (int64_t i = 0; i < m; ++i)
    for (int64_t j = 0; j <= i; ++j)
      raw[static_cast<size_t>(i * m + j)] =
          i == j ? std::log(l.at({i, i})) : l.at({i, j});
  layer.variational_chol_raw = Tensor({1, m, m}, std::move(raw)).with_requires_grad(true);
  layer.variational_mean = Tensor::zeros({m, 1}).with_requires_grad(true);

  RandomStream hr(48);
  Tensor h = gaussian_sample({7, d_in}, hr);
  auto [mean, var] = conditional(layer, h);
  Tensor prior = kernel_diag(h, params);
  for (int64_t i = 0; i < 7; ++i)
    CHECK(var.at({i, 0}) == doctest::Approx(prior[i]).epsilon(1e-8));

  // And the KL against the prior is zero.
  CHECK(kl_to_prior(layer) == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("with S ~ 0 the predictive variance never exceeds the prior") {
  RandomStream rng(53);
  GpLayer layer = test_layer(3, 2, 5, 53);
  layer.variational_chol_raw = raw_chol_diag(2, 5, 1e-26).with_requires_grad(true);
  Tensor h = gaussian_sample({9, 3}, rng);
  auto [mean, var] = conditional(layer, h);
  ArcCosParams params{layer.kernel_log_variance.item()};
  Tensor prior = kernel_diag(h, params);
  for (int64_t i = 0; i < 9; ++i)
    for (int64_t d = 0; d < 2; ++d)
      CHECK(var.at({i, d}) <= prior[i] + 1e-10);
}

TEST_CASE("kl closed form for M=1, K=[1], m=[1], S=[1]") {
  RandomStream rng(59);
  GpLayer layer = GpLayer::create(1, 1, 1, MeanFunctionKind::kZero, 1.0, rng);
  layer.inducing_inputs = Tensor({1, 1}, {1.0}).with_requires_grad(true);
  layer.variational_mean = Tensor({1, 1}, {1.0}).with_requires_grad(true);
  // K_ZZ = k(z,z) = 1 (unit variance, |z| = 1); KL = 0.5.
  CHECK(kl_to_prior(layer) == doctest::Approx(0.5).epsilon(1e-5));
}

TEST_CASE("kl is nonnegative and matches a Monte Carlo estimate within 1%") {
  RandomStream rng(61);
  int64_t m = 5;
  GpLayer layer = test_layer(2, 1, m, 61, 0.6);
  double kl = kl_to_prior(layer);
  CHECK(kl >= -1e-10);

  // Rebuild the same quantities densely for the MC oracle.
  ArcCosParams params{layer.kernel_log_variance.item()};
  Tensor k = arccos_gram(layer.inducing_inputs, layer.inducing_inputs, params);
  double diag_mean = 0.0;
  for (int64_t i = 0; i < m; ++i) diag_mean += k.at({i, i});
  diag_mean /= static_cast<double>(m);
  Eigen::MatrixXd ke(m, m);
  for (int64_t i = 0; i < m; ++i)
    for (int64_t j = 0; j < m; ++j) ke(i, j) = k.at({i, j});
  ke += 1e-6 * diag_mean * Eigen::MatrixXd::Identity(m, m);
  Eigen::VectorXd mean(m);
  for (int64_t i = 0; i < m; ++i) mean(i) = layer.variational_mean.at({i, 0});
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(m, m);
  for (int64_t i = 0; i < m; ++i)
    for (int64_t j = 0; j <= i; ++j)
      l(i, j) = i == j ? std::exp(layer.variational_chol_raw.at({0, i, j}))
                       : layer.variational_chol_raw.at({0, i, j});
  Eigen::MatrixXd s = l * l.transpose();
  double mc = msdgp::testing::mc_kl_gaussian(mean, s, ke, 1000000, 321);
  CHECK(kl == doctest::Approx(mc).epsilon(0.01));
}

TEST_CASE("sampling is deterministic, floors to the mean, and is unbiased") {
  RandomStream rng(67);
  GpLayer layer = test_layer(2, 2, 4, 67);
  Tensor h = gaussian_sample({3, 2}, rng);

  RandomStream s1(5), s2(5);
  CHECK(sample_output(layer, h, s1).same_bits(sample_output(layer, h, s2)));

  // Collapsed variance: outputs equal the conditional mean within 1e-5.
  GpLayer collapsed = test_layer(2, 2, 4, 67);
  collapsed.variational_chol_raw = raw_chol_diag(2, 4, 1e-26).with_requires_grad(true);
  // Also collapse the conditional variance itself: use inputs at Z.
  auto [cmean, cvar] = conditional(collapsed, collapsed.inducing_inputs);
  RandomStream s3(6);
  Tensor draw = sample_output(collapsed, collapsed.inducing_inputs, s3);
  for (int64_t i = 0; i < draw.numel(); ++i) {
    if (cvar[i] <= 1e-12) CHECK(std::abs(draw[i] - cmean[i]) < 1e-5);
  }

  // Monte Carlo mean of draws approaches the conditional mean.
  auto [mean, var] = conditional(layer, h);
  RandomStream s4(7);
  const int64_t reps = 100000;
  std::vector<double> acc(static_cast<size_t>(mean.numel()), 0.0);
  for (int64_t r = 0; r < reps; ++r) {
    Tensor d = sample_output(layer, h, s4);
    for (int64_t i = 0; i < d.numel(); ++i) acc[static_cast<size_t>(i)] += d[i];
  }
  for (int64_t i = 0; i < mean.numel(); ++i) {
    double est = acc[static_cast<size_t>(i)] / static_cast<double>(reps);
    double tol = 3.0 * std::sqrt(var[i] / static_cast<double>(reps));
    CHECK(std::abs(est - mean[i]) <= tol + 1e-12);
  }
}

TEST_CASE("conditional and kl gradients pass finite differences") {
  RandomStream rng(71);
  Tensor h = gaussian_sample({4, 2}, rng);
  Tensor z0 = gaussian_sample({3, 2}, rng);
  Tensor m0 = gaussian_sample({3, 2}, rng);
  Tensor raw0 = raw_chol_diag(2, 3, 0.5);
  Tensor logv0 = Tensor::scalar(0.2);

  auto build_layer = [&](Tape &t, const std::vector<Var> &p, GpLayerVars *vars) {
    vars->inducing_inputs = p[0];
    vars->variational_mean = p[1];
    vars->variational_chol_raw = p[2];
    vars->kernel_log_variance = p[3];
    vars->mean_fn = MeanFunctionKind::kIdentityProjection;
    vars->n_inducing = 3;
    vars->input_dim = 2;
    vars->output_dim = 2;
    return begin_layer_eval(t, *vars);
  };

  auto cond_build = [&](Tape &t, const std::vector<Var> &p) {
    GpLayerVars vars;
    GpLayerEval eval = build_layer(t, p, &vars);
    GpMoments mo = layer_conditional(t, vars, eval, t.constant(h));
    Tensor w({4, 2}, {0.3, -1.0, 0.7, 0.2, -0.4, 1.1, 0.9, -0.6});
    return t.add(t.sum(t.mul(mo.mean, t.constant(w))), t.sum(mo.var));
  };
  auto r1 = msdgp::testing::gradcheck(cond_build, {z0, m0, raw0, logv0},
                                      {"Z", "m", "chol", "logv"});
  CHECK(r1.max_rel_err < 1e-4);

  auto kl_build = [&](Tape &t, const std::vector<Var> &p) {
    GpLayerVars vars;
    GpLayerEval eval = build_layer(t, p, &vars);
    return layer_kl(t, vars, eval);
  };
  auto r2 = msdgp::testing::gradcheck(kl_build, {z0, m0, raw0, logv0},
                                      {"Z", "m", "chol", "logv"});
  CHECK(r2.max_rel_err < 1e-4);
}

TEST_CASE("duplicate inducing rows are rejected") {
  RandomStream rng(73);
  GpLayer layer = GpLayer::create(2, 1, 3, MeanFunctionKind::kZero, 1e-3, rng);
  Tensor dup({3, 2}, {1, 0, 1, 0, 0, 1});
  layer.inducing_inputs = dup.with_requires_grad(true);
  CHECK_THROWS_AS(layer.validate(), InvalidConfig);
}
