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

#include "numerics.hpp"

#include <cmath>
#include <limits>

#include "error.hpp"

namespace idprice {

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) {
    throw Error::usage("matrix data length does not match " +
                       std::to_string(rows_) + "x" + std::to_string(cols_));
  }
}

Matrix Matrix::column(std::vector<double> values) {
  const std::size_t n = values.size();
  return Matrix(n, 1, std::move(values));
}

namespace {

void require_same_shape(const Matrix& a, const Matrix& b, const char* op) {
  if (!a.same_shape(b)) {
    throw Error::usage(std::string(op) + ": shape mismatch " +
                       std::to_string(a.rows()) + "x" +
                       std::to_string(a.cols()) + " vs " +
                       std::to_string(b.rows()) + "x" +
                       std::to_string(b.cols()));
  }
}

}  // namespace

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) {
    throw Error::usage("matmul: inner dimensions " + std::to_string(a.cols()) +
                       " vs " + std::to_string(b.rows()));
  }
  Matrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) {
        out(i, j) += aik * b(k, j);
      }
    }
  }
  return out;
}

Matrix add(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "add");
  Matrix out = a;
  for (std::size_t i = 0; i < out.size(); ++i) {
    out.values()[i] += b.values()[i];
  }
  return out;
}

Matrix sub(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "sub");
  Matrix out = a;
  for (std::size_t i = 0; i < out.size(); ++i) {
    out.values()[i] -= b.values()[i];
  }
  return out;
}

Matrix hadamard(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "hadamard");
  Matrix out = a;
  for (std::size_t i = 0; i < out.size(); ++i) {
    out.values()[i] *= b.values()[i];
  }
  return out;
}

Matrix transpose(const Matrix& a) {
  Matrix out(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) {
      out(j, i) = a(i, j);
    }
  }
  return out;
}

Matrix scaled(const Matrix& a, double factor) {
  Matrix out = a;
  for (double& v : out.values()) v *= factor;
  return out;
}

Matrix map(const Matrix& a, const std::function<double(double)>& fn) {
  Matrix out = a;
  for (double& v : out.values()) v = fn(v);
  return out;
}

Matrix sigmoid(const Matrix& x) {
  return map(x, [](double v) { return 1.0 / (1.0 + std::exp(-v)); });
}

Matrix tanh(const Matrix& x) {
  return map(x, [](double v) { return std::tanh(v); });
}

bool all_finite(const Matrix& m) { return all_finite(m.values()); }

bool all_finite(std::span<const double> values) {
  for (double v : values) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

SeededRng::SeededRng(std::uint64_t seed) : seed_(seed), gen_(seed) {}

SeededRng SeededRng::from_entropy() {
  std::random_device device;
  const std::uint64_t seed =
      (static_cast<std::uint64_t>(device()) << 32) ^ device();
  return SeededRng(seed);
}

std::uint64_t SeededRng::next_u64() { return gen_(); }

double SeededRng::uniform() {
  // 53 random bits -> [0, 1) with full double resolution.
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double SeededRng::uniform(double lo, double hi) {
  return lo + (hi - lo) * uniform();
}

double SeededRng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  // Box-Muller; u1 is shifted away from zero so the log stays finite.
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * 3.14159265358979323846 * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

std::size_t SeededRng::uniform_index(std::size_t n) {
  if (n == 0) throw Error::usage("uniform_index: empty range");
  return static_cast<std::size_t>(next_u64() % n);
}

MinMaxScaler::MinMaxScaler(double value_min, double value_max,
                           double target_lo, double target_hi)
    : value_min_(value_min),
      value_max_(value_max),
      target_lo_(target_lo),
      target_hi_(target_hi) {}

MinMaxScaler MinMaxScaler::fit(std::span<const double> values,
                               double target_lo, double target_hi) {
  if (values.empty()) throw Error::data("scaler fit: empty input");
  double lo = values[0];
  double hi = values[0];
  for (double v : values) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return from_bounds(lo, hi, target_lo, target_hi);
}

MinMaxScaler MinMaxScaler::from_bounds(double value_min, double value_max,
                                       double target_lo, double target_hi) {
  if (!(value_min < value_max)) {
    throw Error::data("scaler fit: degenerate range [" +
                      std::to_string(value_min) + ", " +
                      std::to_string(value_max) + "]");
  }
  if (!(target_lo < target_hi)) {
    throw Error::usage("scaler fit: degenerate target interval");
  }
  return MinMaxScaler(value_min, value_max, target_lo, target_hi);
}

double MinMaxScaler::scale(double value) const {
  return target_lo_ + (value - value_min_) * (target_hi_ - target_lo_) /
                          (value_max_ - value_min_);
}

double MinMaxScaler::unscale(double scaled) const {
  return value_min_ + (scaled - target_lo_) * (value_max_ - value_min_) /
                          (target_hi_ - target_lo_);
}

std::vector<double> MinMaxScaler::scale(std::span<const double> values) const {
  std::vector<double> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) out[i] = scale(values[i]);
  return out;
}

std::vector<double> MinMaxScaler::unscale(
    std::span<const double> scaled) const {
  std::vector<double> out(scaled.size());
  for (std::size_t i = 0; i < scaled.size(); ++i) out[i] = unscale(scaled[i]);
  return out;
}

AdamState::AdamState(std::size_t dim, AdamConfig config)
    : config_(config), m_(dim, 0.0), v_(dim, 0.0) {
  if (!(config_.alpha > 0.0) || !(config_.beta1 >= 0.0 && config_.beta1 < 1.0) ||
      !(config_.beta2 >= 0.0 && config_.beta2 < 1.0) ||
      !(config_.epsilon > 0.0)) {
    throw Error::usage("adam: invalid hyperparameters");
  }
}

void adam_step(std::vector<double>& params, const std::vector<double>& grads,
               AdamState& state, std::string_view name) {
  if (params.size() != grads.size() || params.size() != state.m_.size()) {
    throw Error::usage("adam_step: size mismatch for " + std::string(name));
  }
  for (std::size_t i = 0; i < grads.size(); ++i) {
    if (!std::isfinite(grads[i])) {
      throw Error::numeric("adam_step: non-finite gradient in " +
                           std::string(name) + "[" + std::to_string(i) + "]");
    }
  }
  state.steps_ += 1;
  const AdamConfig& c = state.config_;
  const double bc1 = 1.0 - std::pow(c.beta1, static_cast<double>(state.steps_));
  const double bc2 = 1.0 - std::pow(c.beta2, static_cast<double>(state.steps_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    state.m_[i] = c.beta1 * state.m_[i] + (1.0 - c.beta1) * grads[i];
    state.v_[i] = c.beta2 * state.v_[i] + (1.0 - c.beta2) * grads[i] * grads[i];
    const double m_hat = state.m_[i] / bc1;
    const double v_hat = state.v_[i] / bc2;
    params[i] -= c.alpha * m_hat / (std::sqrt(v_hat) + c.epsilon);
  }
}

std::vector<double> finite_diff_grad(
    const std::function<double(const std::vector<double>&)>& f,
    std::vector<double> x, double h) {
  if (!(h > 0.0)) throw Error::usage("finite_diff_grad: step must be > 0");
  std::vector<double> grad(x.size(), 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double saved = x[i];
    x[i] = saved + h;
    const double fp = f(x);
    x[i] = saved - h;
    const double fm = f(x);
    x[i] = saved;
    if (!std::isfinite(fp) || !std::isfinite(fm)) {
      throw Error::numeric("finite_diff_grad: non-finite probe at coordinate " +
                           std::to_string(i));
    }
    grad[i] = (fp - fm) / (2.0 * h);
  }
  return grad;
}

}  // namespace idprice
