// Copyright 2026 idprice authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <vector>

#include "doctest.h"
#include "error.hpp"
#include "eval.hpp"
#include "nuts.hpp"
#include "numerics.hpp"

using namespace idprice;

namespace {

const LogDensityFn kUnitGaussian = [](std::span<const double> theta,
                                      std::vector<double>* grad) {
  double value = 0.0;
  if (grad) grad->assign(theta.size(), 0.0);
  for (std::size_t i = 0; i < theta.size(); ++i) {
    value -= 0.5 * theta[i] * theta[i];
    if (grad) (*grad)[i] = -theta[i];
  }
  return value;
};

LogDensityFn scaled_gaussian(double sigma) {
  return [sigma](std::span<const double> theta, std::vector<double>* grad) {
    double value = 0.0;
    if (grad) grad->assign(theta.size(), 0.0);
    for (std::size_t i = 0; i < theta.size(); ++i) {
      value -= 0.5 * theta[i] * theta[i] / (sigma * sigma);
      if (grad) (*grad)[i] = -theta[i] / (sigma * sigma);
    }
    return value;
  };
}

std::vector<double> gaussian_mixture_data(std::size_t n, SeededRng& rng) {
  std::vector<double> data;
  data.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const bool right = rng.uniform() < 0.7;
    data.push_back((right ? 5.0 : -5.0) + rng.normal());
  }
  return data;
}

// LU determinant, enough for the 2d x 2d flow-map Jacobian.
double determinant(std::vector<std::vector<double>> m) {
  const std::size_t n = m.size();
  double det = 1.0;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t row = col + 1; row < n; ++row) {
      if (std::abs(m[row][col]) > std::abs(m[pivot][col])) pivot = row;
    }
    if (pivot != col) {
      std::swap(m[pivot], m[col]);
      det = -det;
    }
    det *= m[col][col];
    if (m[col][col] == 0.0) return 0.0;
    for (std::size_t row = col + 1; row < n; ++row) {
      const double factor = m[row][col] / m[col][col];
      for (std::size_t k = col; k < n; ++k) m[row][k] -= factor * m[col][k];
    }
  }
  return det;
}

}  // namespace

TEST_CASE("log_posterior with K=1 reduces to a normal likelihood plus priors") {
  const std::vector<double> data = {1.0, 2.0, 3.0, 4.0};
  const MixtureModel model = MixtureModel::for_data(1, data);
  const double mu = 2.0;
  const double log_sigma = 0.3;
  const std::vector<double> theta = {mu, log_sigma, 0.0};
  const double got = log_posterior(model, theta, data, nullptr);

  const double sigma = std::exp(log_sigma);
  double want = 0.0;
  for (const double x : data) {
    want += -0.5 * std::log(2.0 * 3.14159265358979323846) - std::log(sigma) -
            0.5 * (x - mu) * (x - mu) / (sigma * sigma);
  }
  // Priors: Normal on mu, HalfNormal on sigma with its log-sigma Jacobian,
  // standard normal on the (single) weight logit.
  const double dm = mu - model.prior_mean_loc;
  want += -0.5 * std::log(2.0 * 3.14159265358979323846) -
          std::log(model.prior_mean_scale) -
          0.5 * dm * dm / (model.prior_mean_scale * model.prior_mean_scale);
  want += 0.5 * std::log(2.0 / 3.14159265358979323846) -
          std::log(model.prior_sigma_scale) -
          0.5 * sigma * sigma /
              (model.prior_sigma_scale * model.prior_sigma_scale) +
          log_sigma;
  want += -0.5 * std::log(2.0 * 3.14159265358979323846);
  CHECK(got == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("gradient of mu vanishes at the data mean for K=1") {
  const std::vector<double> data = {-1.0, 0.5, 2.5, 6.0};
  const MixtureModel model = MixtureModel::for_data(1, data);
  double mean = 0.0;
  for (const double x : data) mean += x / static_cast<double>(data.size());
  std::vector<double> grad;
  log_posterior(model, std::vector<double>{mean, 0.1, 0.0}, data, &grad);
  // Likelihood term is stationary and the prior is centered on the mean.
  CHECK(grad[0] == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("log_posterior gradients match finite differences for K in 1..3") {
  SeededRng rng(80);
  std::vector<double> data(50);
  for (double& v : data) v = rng.uniform(-20.0, 60.0);
  for (const int k : {1, 2, 3}) {
    const MixtureModel model = MixtureModel::for_data(k, data);
    std::vector<double> theta(model.dim());
    for (std::size_t i = 0; i < theta.size(); ++i) {
      const std::size_t kk = static_cast<std::size_t>(k);
      if (i < kk) {
        theta[i] = rng.uniform(-10.0, 40.0);  // means
      } else if (i < 2 * kk) {
        theta[i] = rng.uniform(0.5, 2.5);  // log sigmas
      } else {
        theta[i] = rng.uniform(-1.0, 1.0);  // weight logits
      }
    }
    std::vector<double> analytic;
    log_posterior(model, theta, data, &analytic);
    const auto f = [&](const std::vector<double>& t) {
      return log_posterior(model, t, data, nullptr);
    };
    const std::vector<double> numeric = finite_diff_grad(f, theta, 1e-6);
    for (std::size_t i = 0; i < analytic.size(); ++i) {
      const double scale =
          std::max({std::abs(analytic[i]), std::abs(numeric[i]), 1e-4});
      CHECK(std::abs(analytic[i] - numeric[i]) / scale < 1e-5);
    }
  }
}

TEST_CASE("permuting mixture components leaves the posterior unchanged") {
  SeededRng rng(81);
  std::vector<double> data(30);
  for (double& v : data) v = rng.uniform(-5.0, 5.0);
  const MixtureModel model = MixtureModel::for_data(2, data);
  const std::vector<double> theta = {-1.0, 2.0, 0.2, 0.7, 0.3, -0.4};
  const std::vector<double> swapped = {2.0, -1.0, 0.7, 0.2, -0.4, 0.3};
  CHECK(log_posterior(model, theta, data, nullptr) ==
        doctest::Approx(log_posterior(model, swapped, data, nullptr))
            .epsilon(1e-12));
}

TEST_CASE("log_posterior rejects bad inputs") {
  const std::vector<double> data = {1.0, 2.0};
  const MixtureModel model = MixtureModel::for_data(1, data);
  CHECK_THROWS_AS(log_posterior(model, std::vector<double>{0.0}, data, nullptr),
                  Error);
  CHECK_THROWS_AS(log_posterior(model,
                                std::vector<double>{std::nan(""), 0.0, 0.0},
                                data, nullptr),
                  Error);
  CHECK_THROWS_AS(MixtureModel::for_data(0, data), Error);
  CHECK_THROWS_AS(MixtureModel::for_data(6, data), Error);
  CHECK_THROWS_AS(MixtureModel::for_data(2, std::vector<double>{5.0, 5.0}),
                  Error);
}

TEST_CASE("leapfrog reproduces the hand-evaluated unit-Gaussian step") {
  const LeapfrogState start =
      make_leapfrog_state(kUnitGaussian, {1.0}, {0.0});
  const LeapfrogState next = leapfrog(kUnitGaussian, start, 0.1);
  CHECK(next.position[0] == doctest::Approx(0.995).epsilon(1e-12));
  CHECK(next.momentum[0] == doctest::Approx(-0.09975).epsilon(1e-12));
  const double drift = std::abs(hamiltonian(next) - hamiltonian(start));
  CHECK(std::abs(drift - 1.25e-5) < 1e-7);
}

TEST_CASE("leapfrog is time-reversible") {
  SeededRng rng(82);
  for (int trial = 0; trial < 20; ++trial) {
    LeapfrogState start = make_leapfrog_state(
        kUnitGaussian, {rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)},
        {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)});
    LeapfrogState forward = leapfrog(kUnitGaussian, start, 0.3);
    for (double& r : forward.momentum) r = -r;
    const LeapfrogState back = leapfrog(kUnitGaussian, forward, 0.3);
    for (std::size_t i = 0; i < 2; ++i) {
      CHECK(back.position[i] ==
            doctest::Approx(start.position[i]).epsilon(1e-12));
      CHECK(-back.momentum[i] ==
            doctest::Approx(start.momentum[i]).epsilon(1e-12));
    }
  }
}

TEST_CASE("leapfrog approaches the identity as the step vanishes") {
  const LeapfrogState start =
      make_leapfrog_state(kUnitGaussian, {0.8}, {-0.6});
  const LeapfrogState next = leapfrog(kUnitGaussian, start, 1e-9);
  CHECK(next.position[0] == doctest::Approx(0.8).epsilon(1e-9));
  CHECK(next.momentum[0] == doctest::Approx(-0.6).epsilon(1e-9));
  CHECK_THROWS_AS(leapfrog(kUnitGaussian, start, 0.0), Error);
}

TEST_CASE("leapfrog flow preserves phase-space volume") {
  // Smooth anisotropic 3-D Gaussian; Jacobian of (position, momentum) ->
  // step via central differences, determinant must be 1.
  const LogDensityFn target = [](std::span<const double> theta,
                                 std::vector<double>* grad) {
    const double scales[3] = {1.0, 0.5, 2.0};
    double value = 0.0;
    if (grad) grad->assign(3, 0.0);
    for (std::size_t i = 0; i < 3; ++i) {
      value -= 0.5 * theta[i] * theta[i] / (scales[i] * scales[i]);
      if (grad) (*grad)[i] = -theta[i] / (scales[i] * scales[i]);
    }
    return value;
  };
  SeededRng rng(83);
  std::vector<double> state(6);
  for (double& v : state) v = rng.uniform(-1.0, 1.0);

  const auto flow = [&](const std::vector<double>& z) {
    const LeapfrogState start = make_leapfrog_state(
        target, {z[0], z[1], z[2]}, {z[3], z[4], z[5]});
    const LeapfrogState next = leapfrog(target, start, 0.2);
    return std::vector<double>{next.position[0], next.position[1],
                               next.position[2], next.momentum[0],
                               next.momentum[1], next.momentum[2]};
  };

  const double h = 1e-5;
  std::vector<std::vector<double>> jacobian(6, std::vector<double>(6));
  for (std::size_t j = 0; j < 6; ++j) {
    std::vector<double> zp = state, zm = state;
    zp[j] += h;
    zm[j] -= h;
    const auto fp = flow(zp);
    const auto fm = flow(zm);
    for (std::size_t i = 0; i < 6; ++i) {
      jacobian[i][j] = (fp[i] - fm[i]) / (2.0 * h);
    }
  }
  CHECK(std::abs(determinant(jacobian) - 1.0) < 1e-8);
}

TEST_CASE("halving the step cuts the Hamiltonian error at least 6x") {
  const LeapfrogState start =
      make_leapfrog_state(kUnitGaussian, {1.0}, {0.0});
  const double h0 = hamiltonian(start);
  const double big =
      std::abs(hamiltonian(leapfrog(kUnitGaussian, start, 0.1)) - h0);
  const double small =
      std::abs(hamiltonian(leapfrog(kUnitGaussian, start, 0.05)) - h0);
  CHECK(big / small >= 6.0);
}

TEST_CASE("find_reasonable_epsilon lands in the expected bands") {
  {
    SeededRng rng(42);
    const LeapfrogState start =
        make_leapfrog_state(kUnitGaussian, {0.0}, {0.0});
    const double eps = find_reasonable_epsilon(kUnitGaussian, start, rng);
    CHECK(eps >= 0.5);
    CHECK(eps <= 4.0);
  }
  {
    SeededRng rng(42);
    const LogDensityFn narrow = scaled_gaussian(1e-3);
    const LeapfrogState start = make_leapfrog_state(narrow, {0.0}, {0.0});
    const double eps = find_reasonable_epsilon(narrow, start, rng);
    CHECK(eps < 0.1);
  }
  {
    SeededRng a(7), b(7);
    const LeapfrogState start =
        make_leapfrog_state(kUnitGaussian, {0.3}, {0.0});
    CHECK(find_reasonable_epsilon(kUnitGaussian, start, a) ==
          find_reasonable_epsilon(kUnitGaussian, start, b));
  }
}

TEST_CASE("build_tree at depth 0 is exactly one leapfrog step") {
  NutsConfig config;
  SeededRng rng(84);
  const LeapfrogState start =
      make_leapfrog_state(kUnitGaussian, {0.7}, {0.4});
  const double h0 = hamiltonian(start);
  const Tree tree =
      build_tree(kUnitGaussian, start, +1, 0, 0.25, h0, config, rng);
  const LeapfrogState step = leapfrog(kUnitGaussian, start, 0.25);
  CHECK(tree.valid);
  CHECK(!tree.divergent);
  CHECK(tree.proposal == step.position);
  CHECK(tree.forward.position == step.position);
  CHECK(tree.backward.position == step.position);
  CHECK(tree.n_accept == 1);

  const Tree backward_tree =
      build_tree(kUnitGaussian, start, -1, 0, 0.25, h0, config, rng);
  const LeapfrogState back_step = leapfrog(kUnitGaussian, start, -0.25);
  CHECK(backward_tree.proposal == back_step.position);
}

TEST_CASE("a bouncing trajectory triggers the U-turn stop") {
  // Step size 2 on the unit Gaussian makes consecutive nodes swing across
  // the mode with opposing momenta; the depth-1 subtree must stop.
  NutsConfig config;
  SeededRng rng(85);
  const LeapfrogState start =
      make_leapfrog_state(kUnitGaussian, {0.0}, {1.0});
  const double h0 = hamiltonian(start);
  const Tree tree =
      build_tree(kUnitGaussian, start, +1, 1, 2.0, h0, config, rng);
  CHECK(!tree.valid);
  CHECK(!tree.divergent);
}

TEST_CASE("an oversized step on a narrow target flags divergence, no throw") {
  NutsConfig config;
  SeededRng rng(86);
  const LogDensityFn narrow = scaled_gaussian(1e-2);
  const LeapfrogState start = make_leapfrog_state(narrow, {0.0}, {1.0});
  const double h0 = hamiltonian(start);
  const Tree tree = build_tree(narrow, start, +1, 2, 100.0, h0, config, rng);
  CHECK(tree.divergent);
  CHECK(!tree.valid);
}

TEST_CASE("nuts recovers the unit Gaussian") {
  NutsConfig config;
  config.warmup = 1000;
  config.samples = 5000;
  config.seed = 42;
  const NutsResult result = nuts_sample(kUnitGaussian, {0.0}, config);
  REQUIRE(result.draws.size() == 5000);

  double mean = 0.0;
  for (const auto& draw : result.draws) mean += draw[0] / 5000.0;
  double var = 0.0;
  for (const auto& draw : result.draws) {
    var += (draw[0] - mean) * (draw[0] - mean) / 4999.0;
  }
  // 3 / sqrt(n) ~ 0.042 bounds the Monte-Carlo error on the mean.
  CHECK(std::abs(mean) < 0.05);
  CHECK(var > 0.9);
  CHECK(var < 1.1);

  double accept = 0.0;
  std::size_t divergent = 0;
  for (const DrawDiagnostics& d : result.diagnostics) {
    accept += d.accept_stat / 5000.0;
    if (d.divergent) ++divergent;
    CHECK(d.step_size == result.adapted_step_size);
  }
  CHECK(accept > 0.7);
  CHECK(accept < 0.9);
  CHECK(divergent == 0);
}

TEST_CASE("chains are identical for identical seeds") {
  NutsConfig config;
  config.warmup = 200;
  config.samples = 300;
  config.seed = 9;
  const NutsResult a = nuts_sample(kUnitGaussian, {0.5}, config);
  const NutsResult b = nuts_sample(kUnitGaussian, {0.5}, config);
  CHECK(a.draws == b.draws);
  CHECK(a.adapted_step_size == b.adapted_step_size);
  for (std::size_t i = 0; i < a.diagnostics.size(); ++i) {
    CHECK(a.diagnostics[i].tree_depth == b.diagnostics[i].tree_depth);
    CHECK(a.diagnostics[i].accept_stat == b.diagnostics[i].accept_stat);
  }
}

TEST_CASE("nuts config validation fires before sampling") {
  NutsConfig config;
  config.target_accept = 1.5;
  CHECK_THROWS_AS(nuts_sample(kUnitGaussian, {0.0}, config), Error);
  config = NutsConfig{};
  config.max_tree_depth = 13;
  CHECK_THROWS_AS(nuts_sample(kUnitGaussian, {0.0}, config), Error);
  config = NutsConfig{};
  config.samples = 0;
  CHECK_THROWS_AS(nuts_sample(kUnitGaussian, {0.0}, config), Error);
}

TEST_CASE("mixture posterior predictive tracks the data distribution") {
  SeededRng rng(2024);
  const std::vector<double> data = gaussian_mixture_data(200, rng);
  const MixtureModel model = MixtureModel::for_data(2, data);
  NutsConfig config;
  config.warmup = 400;
  config.samples = 800;
  config.seed = 42;
  const PosteriorSamples samples = nuts_sample(model, data, config);
  REQUIRE(samples.draws.size() == 800);
  for (const auto& row : samples.draws) {
    REQUIRE(row.size() == 6);
    CHECK(row[2] > 0.0);  // sigmas positive
    CHECK(row[3] > 0.0);
    CHECK(row[4] == doctest::Approx(1.0 - row[5]).epsilon(1e-9));
  }
  const std::vector<double> predictive = posterior_predictive(samples, 4000, 7);
  CHECK(ks_statistic(predictive, data) < 0.12);
}

TEST_CASE("posterior predictive basics") {
  PosteriorSamples samples;
  samples.components = 2;
  // Degenerate posterior: one repeated row, vanishing sigmas.
  samples.draws.assign(5, {3.0, -2.0, 1e-12, 1e-12, 0.25, 0.75});
  const std::vector<double> draws = posterior_predictive(samples, 500, 11);
  for (const double v : draws) {
    CHECK((std::abs(v - 3.0) < 1e-9 || std::abs(v + 2.0) < 1e-9));
  }
  CHECK(posterior_predictive(samples, 100, 5) ==
        posterior_predictive(samples, 100, 5));
  CHECK_THROWS_AS(posterior_predictive(PosteriorSamples{}, 10, 1), Error);
}

TEST_CASE("posterior predictive mean lands near the data mean") {
  SeededRng rng(90);
  std::vector<double> data(300);
  for (double& v : data) v = 12.0 + 4.0 * rng.normal();
  const MixtureModel model = MixtureModel::for_data(1, data);
  NutsConfig config;
  config.warmup = 300;
  config.samples = 600;
  config.seed = 3;
  const PosteriorSamples samples = nuts_sample(model, data, config);
  const std::vector<double> predictive =
      posterior_predictive(samples, 4000, 13);
  double mean = 0.0;
  for (const double v : predictive) {
    mean += v / static_cast<double>(predictive.size());
  }
  double data_mean = 0.0;
  for (const double v : data) data_mean += v / 300.0;
  // Within a couple of standard errors of the data mean.
  CHECK(std::abs(mean - data_mean) < 2.0 * 4.0 / std::sqrt(300.0) + 0.2);
}
