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
#include "numerics.hpp"

using namespace idprice;

namespace {

Matrix random_matrix(std::size_t rows, std::size_t cols, SeededRng& rng) {
  Matrix m(rows, cols);
  for (double& v : m.values()) v = rng.uniform(-3.0, 3.0);
  return m;
}

// Independent triple-loop reference for matrix products.
Matrix matmul_oracle(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < b.cols(); ++j) {
      double sum = 0.0;
      for (std::size_t k = 0; k < a.cols(); ++k) sum += a(i, k) * b(k, j);
      out(i, j) = sum;
    }
  }
  return out;
}

}  // namespace

TEST_CASE("matmul agrees with the triple-loop oracle") {
  SeededRng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t m = 1 + rng.uniform_index(16);
    const std::size_t k = 1 + rng.uniform_index(16);
    const std::size_t n = 1 + rng.uniform_index(16);
    const Matrix a = random_matrix(m, k, rng);
    const Matrix b = random_matrix(k, n, rng);
    const Matrix got = matmul(a, b);
    const Matrix want = matmul_oracle(a, b);
    for (std::size_t i = 0; i < got.size(); ++i) {
      CHECK(got.values()[i] ==
            doctest::Approx(want.values()[i]).epsilon(1e-10));
    }
  }
  CHECK_THROWS_AS(matmul(Matrix(2, 3), Matrix(2, 3)), Error);
}

TEST_CASE("sigmoid and tanh anchors") {
  const Matrix zero(2, 2);
  const Matrix s = sigmoid(zero);
  const Matrix t = tanh(zero);
  for (double v : s.values()) CHECK(v == doctest::Approx(0.5));
  for (double v : t.values()) CHECK(v == doctest::Approx(0.0));
}

TEST_CASE("sigmoid symmetry: sigmoid(-x) = 1 - sigmoid(x)") {
  SeededRng rng(11);
  const Matrix x = random_matrix(4, 5, rng);
  const Matrix a = sigmoid(x);
  const Matrix b = sigmoid(scaled(x, -1.0));
  for (std::size_t i = 0; i < x.size(); ++i) {
    CHECK(b.values()[i] == doctest::Approx(1.0 - a.values()[i]).epsilon(1e-12));
  }
}

TEST_CASE("tanh matches the exponential-formula oracle") {
  SeededRng rng(13);
  for (int i = 0; i < 100; ++i) {
    const double x = rng.uniform(-5.0, 5.0);
    const double oracle =
        (std::exp(x) - std::exp(-x)) / (std::exp(x) + std::exp(-x));
    const Matrix t = tanh(Matrix(1, 1, {x}));
    CHECK(t(0, 0) == doctest::Approx(oracle).epsilon(1e-12));
  }
}

TEST_CASE("hadamard identities and loop oracle") {
  SeededRng rng(17);
  const Matrix a = random_matrix(3, 4, rng);
  Matrix ones(3, 4);
  for (double& v : ones.values()) v = 1.0;
  const Matrix same = hadamard(a, ones);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(same.values()[i] == a.values()[i]);
  }
  const Matrix zeros = hadamard(a, Matrix(3, 4));
  for (double v : zeros.values()) CHECK(v == 0.0);

  const Matrix b = random_matrix(3, 4, rng);
  const Matrix got = hadamard(a, b);
  for (std::size_t r = 0; r < 3; ++r) {
    for (std::size_t c = 0; c < 4; ++c) {
      CHECK(got(r, c) == doctest::Approx(a(r, c) * b(r, c)).epsilon(1e-12));
    }
  }
  CHECK_THROWS_AS(hadamard(a, Matrix(4, 3)), Error);
}

TEST_CASE("seeded rng streams are reproducible") {
  SeededRng a(42);
  SeededRng b(42);
  for (int i = 0; i < 1000; ++i) {
    CHECK(a.uniform() == b.uniform());
    CHECK(a.normal() == b.normal());
  }
  CHECK(std::string(a.algorithm()) == "mt19937_64/box-muller");
}

TEST_CASE("rng normal moments are sane") {
  SeededRng rng(5);
  double sum = 0.0;
  double sum_sq = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double v = rng.normal();
    sum += v;
    sum_sq += v * v;
  }
  CHECK(std::abs(sum / n) < 0.03);
  CHECK(sum_sq / n == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("minmax scaler endpoints and round trip") {
  const std::vector<double> values = {3.0, -1.0, 7.0, 2.0};
  const MinMaxScaler scaler = MinMaxScaler::fit(values);
  CHECK(scaler.scale(-1.0) == doctest::Approx(-1.0));
  CHECK(scaler.scale(7.0) == doctest::Approx(1.0));
  SeededRng rng(23);
  for (int i = 0; i < 100; ++i) {
    const double v = rng.uniform(-10.0, 10.0);
    CHECK(scaler.unscale(scaler.scale(v)) ==
          doctest::Approx(v).epsilon(1e-12));
  }
}

TEST_CASE("scaler rejects degenerate input") {
  const std::vector<double> constant(5, 4.2);
  CHECK_THROWS_AS(MinMaxScaler::fit(constant), Error);
  CHECK_THROWS_AS(MinMaxScaler::fit(std::vector<double>{}), Error);
}

TEST_CASE("scaler maps the observed price extremes onto [-1, 1]") {
  // Matches the published summary extremes of the pooled average prices.
  const MinMaxScaler scaler = MinMaxScaler::from_bounds(-29.21, 100.00);
  CHECK(scaler.scale(-29.21) == doctest::Approx(-1.0));
  CHECK(scaler.scale(100.00) == doctest::Approx(1.0));
}

TEST_CASE("adam: zero gradient leaves parameters, bumps the counter") {
  std::vector<double> params = {1.0, -2.0};
  const std::vector<double> grads = {0.0, 0.0};
  AdamState state(2);
  adam_step(params, grads, state);
  CHECK(params[0] == 1.0);
  CHECK(params[1] == -2.0);
  CHECK(state.steps() == 1);
}

TEST_CASE("adam: constant gradient update tends to alpha * sign(g)") {
  std::vector<double> params = {0.0};
  const std::vector<double> grads = {3.5};
  AdamConfig config;
  AdamState state(1, config);
  double prev = params[0];
  for (int i = 0; i < 200; ++i) {
    adam_step(params, grads, state);
    if (i >= 150) {
      CHECK(prev - params[0] == doctest::Approx(config.alpha).epsilon(1e-6));
    }
    prev = params[0];
  }
}

TEST_CASE("adam descends f(x) = x^2") {
  std::vector<double> params = {1.0};
  AdamConfig config;
  config.alpha = 0.05;
  AdamState state(1, config);
  double last = params[0] * params[0];
  for (int i = 0; i < 10; ++i) {
    const std::vector<double> grads = {2.0 * params[0]};
    adam_step(params, grads, state);
    const double f = params[0] * params[0];
    CHECK(f < last);
    last = f;
  }
}

TEST_CASE("adam rejects non-finite gradients with the parameter name") {
  std::vector<double> params = {0.0};
  const std::vector<double> grads = {std::nan("")};
  AdamState state(1);
  try {
    adam_step(params, grads, state, "toy");
    FAIL("expected divergence error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::numeric);
    CHECK(std::string(e.what()).find("toy") != std::string::npos);
  }
}

TEST_CASE("adam keeps parameters finite under wild finite gradients") {
  SeededRng rng(31);
  std::vector<double> params(8, 0.0);
  AdamState state(8);
  for (int step = 0; step < 500; ++step) {
    std::vector<double> grads(8);
    for (double& g : grads) g = rng.uniform(-1e6, 1e6);
    adam_step(params, grads, state);
    CHECK(all_finite(params));
  }
}

TEST_CASE("finite differences: constant function has zero gradient") {
  const auto f = [](const std::vector<double>&) { return 3.0; };
  const auto grad = finite_diff_grad(f, {1.0, 2.0, 3.0}, 1e-5);
  for (double g : grad) CHECK(g == doctest::Approx(0.0));
}

TEST_CASE("finite differences recover the gradient of 0.5*|x|^2") {
  const auto f = [](const std::vector<double>& x) {
    double sum = 0.0;
    for (double v : x) sum += v * v;
    return 0.5 * sum;
  };
  const std::vector<double> x = {0.4, -1.7, 2.2};
  const auto grad = finite_diff_grad(f, x, 1e-6);
  for (std::size_t i = 0; i < x.size(); ++i) {
    CHECK(grad[i] == doctest::Approx(x[i]).epsilon(1e-8));
  }
}

TEST_CASE("finite differences flag non-finite probes") {
  const auto f = [](const std::vector<double>& x) {
    return x[0] > 0.0 ? std::log(x[0]) : std::log(-1.0);
  };
  CHECK_THROWS_AS(finite_diff_grad(f, {1e-9}, 1e-5), Error);
}
