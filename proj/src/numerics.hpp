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

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace idprice {

// Dense row-major matrix of doubles. The networks here are tiny, so plain
// loops are fast enough and keep every operation auditable.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  static Matrix column(std::vector<double> values);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }

  double& operator()(std::size_t r, std::size_t c) {
    return data_[r * cols_ + c];
  }
  double operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }

  std::vector<double>& values() { return data_; }
  const std::vector<double>& values() const { return data_; }

  bool same_shape(const Matrix& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix matmul(const Matrix& a, const Matrix& b);
Matrix add(const Matrix& a, const Matrix& b);
Matrix sub(const Matrix& a, const Matrix& b);
Matrix hadamard(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& a);
Matrix scaled(const Matrix& a, double factor);
Matrix map(const Matrix& a, const std::function<double(double)>& fn);

// Elementwise 1/(1+e^-x); outputs in (0,1).
Matrix sigmoid(const Matrix& x);
// Elementwise hyperbolic tangent; outputs in (-1,1).
Matrix tanh(const Matrix& x);

bool all_finite(const Matrix& m);
bool all_finite(std::span<const double> values);

// Deterministic random source. The generator and every derived draw are
// fully specified here (mt19937_64 plus Box-Muller for normals), so streams
// are reproducible bit-for-bit across platforms for a given seed.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed);
  static SeededRng from_entropy();

  std::uint64_t seed() const { return seed_; }
  const char* algorithm() const { return "mt19937_64/box-muller"; }

  std::uint64_t next_u64();
  double uniform();                          // [0, 1)
  double uniform(double lo, double hi);      // [lo, hi)
  double normal();                           // standard normal
  std::size_t uniform_index(std::size_t n);  // [0, n)

 private:
  std::uint64_t seed_;
  std::mt19937_64 gen_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// Affine map of an observed [min, max] price range onto a target interval
// (default [-1, 1], matching a tanh-output generator) and back.
class MinMaxScaler {
 public:
  static MinMaxScaler fit(std::span<const double> values,
                          double target_lo = -1.0, double target_hi = 1.0);
  static MinMaxScaler from_bounds(double value_min, double value_max,
                                  double target_lo = -1.0,
                                  double target_hi = 1.0);

  double scale(double value) const;
  double unscale(double scaled) const;
  std::vector<double> scale(std::span<const double> values) const;
  std::vector<double> unscale(std::span<const double> scaled) const;

  double value_min() const { return value_min_; }
  double value_max() const { return value_max_; }
  double target_lo() const { return target_lo_; }
  double target_hi() const { return target_hi_; }

 private:
  MinMaxScaler(double value_min, double value_max, double target_lo,
               double target_hi);

  double value_min_;
  double value_max_;
  double target_lo_;
  double target_hi_;
};

struct AdamConfig {
  double alpha = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

class AdamState {
 public:
  explicit AdamState(std::size_t dim, AdamConfig config = {});

  std::uint64_t steps() const { return steps_; }
  const AdamConfig& config() const { return config_; }
  const std::vector<double>& first_moment() const { return m_; }
  const std::vector<double>& second_moment() const { return v_; }

  friend void adam_step(std::vector<double>& params,
                        const std::vector<double>& grads, AdamState& state,
                        std::string_view name);

 private:
  AdamConfig config_;
  std::uint64_t steps_ = 0;
  std::vector<double> m_;
  std::vector<double> v_;
};

// One bias-corrected Adam update in place. `name` labels the parameter block
// in divergence errors.
void adam_step(std::vector<double>& params, const std::vector<double>& grads,
               AdamState& state, std::string_view name = "params");

// Central-difference gradient (f(x+h e_i) - f(x-h e_i)) / 2h per coordinate.
// Serves as the independent check for every hand-derived gradient in the
// model modules.
std::vector<double> finite_diff_grad(
    const std::function<double(const std::vector<double>&)>& f,
    std::vector<double> x, double h);

}  // namespace idprice
