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

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "market_data.hpp"
#include "numerics.hpp"

namespace idprice {

// One gate's parameters: the recurrent path acts on the previous cell output,
// the input path acts on the current input.
struct GateParams {
  Matrix recurrent;  // hidden x hidden
  Matrix input;      // hidden x input_dim
  Matrix bias;       // hidden x 1
};

// A single LSTM cell with three sigmoid switches (input admission, previous-
// state carry-over, output exposure) plus a tanh candidate path, and a linear
// scalar readout producing one price per step.
struct LstmParams {
  std::size_t input_dim = 1;
  std::size_t hidden_dim = 1;
  GateParams candidate;    // tanh path
  GateParams input_gate;   // admits the candidate into the state
  GateParams skip_gate;    // carries the previous state forward
  GateParams output_gate;  // exposes the state as output
  Matrix readout_weight;   // 1 x hidden
  double readout_bias = 0.0;

  static LstmParams zeros(std::size_t input_dim, std::size_t hidden_dim);
  // Uniform(-k, k) with k = 1/sqrt(hidden_dim), drawn from `rng`.
  static LstmParams init(std::size_t input_dim, std::size_t hidden_dim,
                         SeededRng& rng);

  std::size_t param_count() const;
  std::vector<double> flatten() const;
  void assign_from_flat(std::span<const double> flat);
  // Gradient container with the same shape-set, all zeros.
  LstmParams zeros_like() const;
};

struct LstmState {
  Matrix output;  // y, hidden x 1, entries in (-1, 1)
  Matrix cell;    // s, hidden x 1

  static LstmState zero(std::size_t hidden_dim);
};

struct LstmHyper {
  std::size_t hidden_dim = 32;
  std::size_t window = 24;
  std::size_t epochs = 500;
  double learning_rate = 1e-2;
  double clip_norm = 5.0;  // global gradient norm
  std::uint64_t seed = 0;

  void validate() const;
};

// One step of the cell recurrence:
//   s_t = sig(skip) o s_{t-1} + sig(input_gate) o tanh(candidate)
//   y_t = sig(output_gate) o tanh(s_t)
// where each pre-activation is recurrent*y_{t-1} + input*x_t + bias.
LstmState lstm_cell_forward(const LstmParams& params, const Matrix& x,
                            const LstmState& prev);

struct SequenceResult {
  std::vector<double> predictions;  // readout applied to every y_t
  LstmState final_state;
};

// Runs the cell over a scalar input sequence from a zero initial state.
SequenceResult lstm_sequence_forward(const LstmParams& params,
                                     std::span<const double> inputs);

double mse_loss(std::span<const double> predicted,
                std::span<const double> target);

// Exact gradients of mse_loss(predictions, targets) by backpropagation
// through time. Returns (loss, gradients in LstmParams shape).
std::pair<double, LstmParams> lstm_backprop(const LstmParams& params,
                                            std::span<const double> inputs,
                                            std::span<const double> targets);

struct LstmTrainResult {
  LstmParams params;
  std::vector<double> train_mse;  // per epoch
  std::vector<double> test_mse;   // per epoch; empty when no held-out set
};

// Full-batch Adam with global-norm gradient clipping over (window, next)
// pairs of pre-scaled prices. Each pair trains one-step-ahead targets over
// the whole window (the shifted window plus the next value).
LstmTrainResult train_lstm(std::span<const WindowSample> train,
                           std::span<const WindowSample> heldout,
                           const LstmHyper& hyper);

// Recursive generation: predict one step, append, repeat. `seed_window` holds
// the last `window` observed prices in EUR/MWh; outputs are unscaled back to
// EUR/MWh.
std::vector<double> lstm_generate(const LstmParams& params,
                                  const MinMaxScaler& scaler,
                                  std::span<const double> seed_window,
                                  std::size_t horizon);

// One-step-ahead mode: hour h is predicted from actual observed prices up to
// hour h-1 (seed window plus the day's actuals), not from prior predictions.
std::vector<double> lstm_predict_day_one_step(
    const LstmParams& params, const MinMaxScaler& scaler,
    std::span<const double> seed_window, std::span<const double> day_actuals);

DayProfile lstm_generate_profile(const LstmParams& params,
                                 const MinMaxScaler& scaler,
                                 std::span<const double> seed_window,
                                 Date date, const std::string& zone);

}  // namespace idprice
