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

#include <algorithm>
#include <cmath>
#include <vector>

#include "dcgan.hpp"
#include "doctest.h"
#include "error.hpp"
#include "numerics.hpp"

using namespace idprice;

namespace {

std::vector<std::vector<double>> random_batch(std::size_t n, std::size_t len,
                                              SeededRng& rng, double lo,
                                              double hi) {
  std::vector<std::vector<double>> batch(n, std::vector<double>(len));
  for (auto& row : batch) {
    for (double& v : row) v = rng.uniform(lo, hi);
  }
  return batch;
}

// Layer-by-layer dense reference for the fallback discriminator.
double dense_forward_oracle(const Net& net, const std::vector<double>& input) {
  std::vector<double> current = input;
  std::size_t offset = 0;
  for (const LayerSpec& spec : net.specs()) {
    const std::size_t out_size = spec.out_channels * spec.out_length;
    std::vector<double> next(out_size, 0.0);
    for (std::size_t o = 0; o < out_size; ++o) {
      double acc = 0.0;
      for (std::size_t i = 0; i < current.size(); ++i) {
        acc += net.params()[offset + o * current.size() + i] * current[i];
      }
      next[o] = acc;
    }
    offset += out_size * current.size();
    for (std::size_t oc = 0; oc < spec.out_channels; ++oc) {
      for (std::size_t p = 0; p < spec.out_length; ++p) {
        next[oc * spec.out_length + p] += net.params()[offset + oc];
      }
    }
    offset += spec.out_channels;
    for (double& v : next) {
      switch (spec.activation) {
        case Activation::relu:
          v = std::max(v, 0.0);
          break;
        case Activation::leaky_relu:
          v = v > 0.0 ? v : 0.2 * v;
          break;
        case Activation::tanh:
          v = std::tanh(v);
          break;
        case Activation::sigmoid:
          v = 1.0 / (1.0 + std::exp(-v));
          break;
        case Activation::none:
          break;
      }
    }
    current = next;
  }
  return current[0];
}

}  // namespace

TEST_CASE("generator with zero weights emits the zero profile") {
  GanHyper hyper;
  hyper.dense_arch = true;
  const Net g = make_generator(hyper);  // params default to zero
  const std::vector<double> out =
      g.forward(std::vector<double>(hyper.latent_dim, 1.3));
  REQUIRE(out.size() == 24);
  for (double v : out) CHECK(v == 0.0);
}

TEST_CASE("generator is deterministic and strictly inside (-1, 1)") {
  GanHyper hyper;
  SeededRng rng(60);
  for (const bool dense : {true, false}) {
    hyper.dense_arch = dense;
    Net g = make_generator(hyper);
    g.init_params(rng);
    std::vector<double> latent(hyper.latent_dim);
    for (double& v : latent) v = rng.normal();
    CHECK(g.forward(latent) == g.forward(latent));
    for (int i = 0; i < 1000; ++i) {
      for (double& v : latent) v = rng.normal();
      for (double v : g.forward(latent)) {
        CHECK(v > -1.0);
        CHECK(v < 1.0);
      }
    }
  }
}

TEST_CASE("discriminator with zero weights answers 0.5") {
  GanHyper hyper;
  hyper.dense_arch = true;
  const Net d = make_discriminator(hyper);
  CHECK(discriminator_forward(d, std::vector<double>(24, 0.9)) == 0.5);
}

TEST_CASE("discriminator output stays inside (0, 1) for extreme profiles") {
  GanHyper hyper;
  SeededRng rng(61);
  for (const bool dense : {true, false}) {
    hyper.dense_arch = dense;
    Net d = make_discriminator(hyper);
    d.init_params(rng);
    for (const double level : {-1.0, 1.0}) {
      const double y = discriminator_forward(d, std::vector<double>(24, level));
      CHECK(y > 0.0);
      CHECK(y < 1.0);
    }
  }
}

TEST_CASE("dense discriminator matches the layer-by-layer oracle") {
  GanHyper hyper;
  hyper.dense_arch = true;
  SeededRng rng(62);
  Net d = make_discriminator(hyper);
  d.init_params(rng);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> profile(24);
    for (double& v : profile) v = rng.uniform(-1.0, 1.0);
    CHECK(discriminator_forward(d, profile) ==
          doctest::Approx(dense_forward_oracle(d, profile)).epsilon(1e-12));
  }
}

TEST_CASE("conv shapes chain 24 -> 12 -> 6 and back") {
  GanHyper hyper;
  const Net d = make_discriminator(hyper);
  CHECK(d.input_size() == 24);
  CHECK(d.output_size() == 1);
  const Net g = make_generator(hyper);
  CHECK(g.input_size() == 16);
  CHECK(g.output_size() == 24);
}

TEST_CASE("gan_value anchors") {
  const std::vector<double> optimal_real(8, 1.0 - kGanLogClamp);
  const std::vector<double> optimal_fake(8, kGanLogClamp);
  CHECK(std::abs(gan_value(optimal_real, optimal_fake)) < 1e-5);

  const std::vector<double> half(4, 0.5);
  CHECK(gan_value(half, half) == doctest::Approx(-1.386294).epsilon(1e-6));

  CHECK_THROWS_AS(gan_value({}, half), Error);
}

TEST_CASE("gan_value is never positive and ignores batch order") {
  SeededRng rng(63);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> real(1 + rng.uniform_index(16));
    std::vector<double> fake(1 + rng.uniform_index(16));
    for (double& v : real) v = rng.uniform(0.0, 1.0);
    for (double& v : fake) v = rng.uniform(0.0, 1.0);
    const double value = gan_value(real, fake);
    CHECK(value <= 1e-12);
    std::vector<double> shuffled = real;
    std::reverse(shuffled.begin(), shuffled.end());
    CHECK(gan_value(shuffled, fake) == doctest::Approx(value).epsilon(1e-12));
  }
}

TEST_CASE("discriminator gradients match finite differences (dense 8->4->1)") {
  // Smooth hidden activation; finite differences are unreliable across the
  // relu/leaky kinks even when the analytic gradient is right.
  SeededRng rng(64);
  Net d(1, 8,
        {LayerSpec::dense(4, Activation::tanh),
         LayerSpec::dense(1, Activation::sigmoid)});
  d.init_params(rng);
  const auto real = random_batch(3, 8, rng, -1.0, 1.0);
  const auto fake = random_batch(2, 8, rng, -1.0, 1.0);

  std::vector<double> analytic(d.param_count(), 0.0);
  discriminator_loss_and_grad(d, real, fake, &analytic);

  Net probe = d;
  const auto f = [&](const std::vector<double>& flat) {
    probe.params() = flat;
    return discriminator_loss_and_grad(probe, real, fake, nullptr);
  };
  const std::vector<double> numeric = finite_diff_grad(f, d.params(), 1e-6);
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    const double scale =
        std::max({std::abs(analytic[i]), std::abs(numeric[i]), 1e-7});
    CHECK(std::abs(analytic[i] - numeric[i]) / scale < 1e-4);
  }
}

TEST_CASE("generator gradients match finite differences through D") {
  SeededRng rng(65);
  Net g(1, 3,
        {LayerSpec::dense(4, Activation::tanh),
         LayerSpec::dense(8, Activation::tanh)});
  Net d(1, 8,
        {LayerSpec::dense(4, Activation::tanh),
         LayerSpec::dense(1, Activation::sigmoid)});
  g.init_params(rng);
  d.init_params(rng);
  const auto latents = random_batch(3, 3, rng, -2.0, 2.0);

  std::vector<double> analytic(g.param_count(), 0.0);
  generator_loss_and_grad(g, d, latents, &analytic);

  Net probe = g;
  const auto f = [&](const std::vector<double>& flat) {
    probe.params() = flat;
    return generator_loss_and_grad(probe, d, latents, nullptr);
  };
  const std::vector<double> numeric = finite_diff_grad(f, g.params(), 1e-6);
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    const double scale =
        std::max({std::abs(analytic[i]), std::abs(numeric[i]), 1e-7});
    CHECK(std::abs(analytic[i] - numeric[i]) / scale < 1e-4);
  }
}

TEST_CASE("conv and tconv gradients match finite differences") {
  // Smooth activations only, so central differences are clean.
  SeededRng rng(66);
  Net net(1, 8,
          {LayerSpec::conv1d(3, 4, 2, 1, Activation::tanh),
           LayerSpec::tconv1d(2, 4, 2, 1, Activation::tanh),
           LayerSpec::dense(1, Activation::sigmoid)});
  net.init_params(rng);
  std::vector<double> input(8);
  for (double& v : input) v = rng.uniform(-1.0, 1.0);

  const auto loss = [&](const Net& n) {
    const double y = n.forward(input)[0];
    return -std::log(y);
  };
  std::vector<double> analytic(net.param_count(), 0.0);
  {
    const Net::Trace trace = net.forward_trace(input);
    const double y = trace.outputs.back()[0];
    const double dy = -1.0 / y;
    net.backward(trace, std::span<const double>(&dy, 1), &analytic);
  }
  Net probe = net;
  const auto f = [&](const std::vector<double>& flat) {
    probe.params() = flat;
    return loss(probe);
  };
  const std::vector<double> numeric = finite_diff_grad(f, net.params(), 1e-6);
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    const double scale =
        std::max({std::abs(analytic[i]), std::abs(numeric[i]), 1e-7});
    CHECK(std::abs(analytic[i] - numeric[i]) / scale < 1e-4);
  }
}

TEST_CASE("input gradients are exact too") {
  SeededRng rng(67);
  Net d(1, 8,
        {LayerSpec::dense(4, Activation::tanh),
         LayerSpec::dense(1, Activation::sigmoid)});
  d.init_params(rng);
  std::vector<double> x(8);
  for (double& v : x) v = rng.uniform(-1.0, 1.0);

  const Net::Trace trace = d.forward_trace(x);
  const double y = trace.outputs.back()[0];
  const double dy = -1.0 / y;
  const std::vector<double> analytic =
      d.backward(trace, std::span<const double>(&dy, 1), nullptr);

  for (std::size_t i = 0; i < x.size(); ++i) {
    const double h = 1e-6;
    std::vector<double> xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    const double numeric = (-std::log(d.forward(xp)[0]) +
                            std::log(d.forward(xm)[0])) /
                           (2.0 * h);
    const double scale =
        std::max({std::abs(analytic[i]), std::abs(numeric), 1e-7});
    CHECK(std::abs(analytic[i] - numeric) / scale < 1e-4);
  }
}

TEST_CASE("discriminator alone improves the minimax value on fixed G") {
  GanHyper hyper;
  hyper.dense_arch = true;
  hyper.seed = 42;
  SeededRng rng(hyper.seed);
  Net g = make_generator(hyper);
  Net d = make_discriminator(hyper);
  g.init_params(rng);
  d.init_params(rng);

  const auto real = random_batch(16, 24, rng, 0.2, 0.9);
  std::vector<std::vector<double>> fake;
  for (int i = 0; i < 16; ++i) {
    std::vector<double> latent(hyper.latent_dim);
    for (double& v : latent) v = rng.normal();
    fake.push_back(g.forward(latent));
  }
  const auto value_now = [&]() {
    std::vector<double> dr(real.size()), df(fake.size());
    for (std::size_t i = 0; i < real.size(); ++i) {
      dr[i] = discriminator_forward(d, real[i]);
    }
    for (std::size_t i = 0; i < fake.size(); ++i) {
      df[i] = discriminator_forward(d, fake[i]);
    }
    return gan_value(dr, df);
  };

  AdamConfig config;
  config.alpha = 1e-3;
  config.beta1 = 0.5;
  AdamState adam(d.param_count(), config);
  int improved = 0;
  double before = value_now();
  for (int step = 0; step < 100; ++step) {
    std::vector<double> grad(d.param_count(), 0.0);
    discriminator_loss_and_grad(d, real, fake, &grad);
    adam_step(d.params(), grad, adam, "discriminator");
    const double after = value_now();
    if (after >= before) ++improved;
    before = after;
  }
  CHECK(improved >= 90);
}

TEST_CASE("training on one repeated profile collapses onto it") {
  GanHyper hyper;
  hyper.dense_arch = true;
  hyper.seed = 42;
  hyper.epochs = 2000;
  std::vector<double> target(24);
  for (int h = 0; h < 24; ++h) {
    target[static_cast<std::size_t>(h)] =
        0.8 * std::sin(2.0 * 3.14159265358979323846 * h / 24.0);
  }
  const std::vector<std::vector<double>> profiles(8, target);
  const GanTrainResult result = train_dcgan(profiles, hyper);
  REQUIRE(result.value_history.size() == hyper.epochs);

  SeededRng rng(123);
  std::vector<double> mean(24, 0.0);
  const MinMaxScaler identity = MinMaxScaler::from_bounds(-1.0, 1.0, -1.0, 1.0);
  const auto samples = sample_prices(result.generator, identity, 100, rng);
  for (const auto& sample : samples) {
    for (std::size_t h = 0; h < 24; ++h) mean[h] += sample[h] / 100.0;
  }
  for (std::size_t h = 0; h < 24; ++h) {
    CHECK(std::abs(mean[h] - target[h]) < 0.15);
  }
}

TEST_CASE("training is deterministic in the seed") {
  GanHyper hyper;
  hyper.dense_arch = true;
  hyper.seed = 9;
  hyper.epochs = 30;
  SeededRng rng(70);
  const auto profiles = random_batch(6, 24, rng, -0.8, 0.8);
  const GanTrainResult a = train_dcgan(profiles, hyper);
  const GanTrainResult b = train_dcgan(profiles, hyper);
  CHECK(a.value_history == b.value_history);
  CHECK(a.generator.params() == b.generator.params());
  CHECK(a.discriminator.params() == b.discriminator.params());
}

TEST_CASE("sampled prices stay inside the scaler envelope") {
  GanHyper hyper;
  SeededRng init(71);
  Net g = make_generator(hyper);
  g.init_params(init);
  const MinMaxScaler scaler = MinMaxScaler::from_bounds(-29.21, 100.00);
  SeededRng rng(72);
  const auto scenarios = sample_prices(g, scaler, 200, rng);
  REQUIRE(scenarios.size() == 200);
  for (const auto& scenario : scenarios) {
    for (double v : scenario) {
      CHECK(v >= -29.21);
      CHECK(v <= 100.00);
    }
  }
  SeededRng rng2(72);
  CHECK(sample_prices(g, scaler, 5, rng2) ==
        std::vector<std::vector<double>>(scenarios.begin(),
                                         scenarios.begin() + 5));
  SeededRng rng3(73);
  CHECK(sample_prices(g, scaler, 0, rng3).empty());
}

TEST_CASE("train_dcgan validates inputs") {
  GanHyper hyper;
  hyper.dense_arch = true;
  CHECK_THROWS_AS(train_dcgan({}, hyper), Error);
  CHECK_THROWS_AS(train_dcgan({std::vector<double>(7, 0.0)}, hyper), Error);
  GanHyper bad;
  bad.lr_generator = 0.0;
  CHECK_THROWS_AS(train_dcgan({std::vector<double>(24, 0.0)}, bad), Error);
}
