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

#include "lstm.hpp"

#include <cmath>

#include "error.hpp"

namespace idprice {

namespace {

Matrix uniform_matrix(std::size_t rows, std::size_t cols, double k,
                      SeededRng& rng) {
  Matrix m(rows, cols);
  for (double& v : m.values()) v = rng.uniform(-k, k);
  return m;
}

GateParams zero_gate(std::size_t input_dim, std::size_t hidden_dim) {
  return {Matrix(hidden_dim, hidden_dim), Matrix(hidden_dim, input_dim),
          Matrix(hidden_dim, 1)};
}

void append(std::vector<double>& out, const Matrix& m) {
  out.insert(out.end(), m.values().begin(), m.values().end());
}

void take(std::span<const double>& flat, Matrix& m) {
  if (flat.size() < m.size()) {
    throw Error::usage("lstm params: flat vector too short");
  }
  std::copy(flat.begin(), flat.begin() + static_cast<std::ptrdiff_t>(m.size()),
            m.values().begin());
  flat = flat.subspan(m.size());
}

template <typename Fn>
void for_each_gate(LstmParams& p, Fn&& fn) {
  fn(p.candidate);
  fn(p.input_gate);
  fn(p.skip_gate);
  fn(p.output_gate);
}

template <typename Fn>
void for_each_gate(const LstmParams& p, Fn&& fn) {
  fn(p.candidate);
  fn(p.input_gate);
  fn(p.skip_gate);
  fn(p.output_gate);
}

}  // namespace

LstmParams LstmParams::zeros(std::size_t input_dim, std::size_t hidden_dim) {
  if (input_dim < 1 || hidden_dim < 1) {
    throw Error::usage("lstm dimensions must be >= 1");
  }
  LstmParams p;
  p.input_dim = input_dim;
  p.hidden_dim = hidden_dim;
  p.candidate = zero_gate(input_dim, hidden_dim);
  p.input_gate = zero_gate(input_dim, hidden_dim);
  p.skip_gate = zero_gate(input_dim, hidden_dim);
  p.output_gate = zero_gate(input_dim, hidden_dim);
  p.readout_weight = Matrix(1, hidden_dim);
  p.readout_bias = 0.0;
  return p;
}

LstmParams LstmParams::init(std::size_t input_dim, std::size_t hidden_dim,
                            SeededRng& rng) {
  LstmParams p = zeros(input_dim, hidden_dim);
  const double k = 1.0 / std::sqrt(static_cast<double>(hidden_dim));
  for_each_gate(p, [&](GateParams& gate) {
    gate.recurrent = uniform_matrix(hidden_dim, hidden_dim, k, rng);
    gate.input = uniform_matrix(hidden_dim, input_dim, k, rng);
    gate.bias = uniform_matrix(hidden_dim, 1, k, rng);
  });
  p.readout_weight = uniform_matrix(1, hidden_dim, k, rng);
  p.readout_bias = rng.uniform(-k, k);
  return p;
}

std::size_t LstmParams::param_count() const {
  return 4 * (hidden_dim * hidden_dim + hidden_dim * input_dim + hidden_dim) +
         hidden_dim + 1;
}

std::vector<double> LstmParams::flatten() const {
  std::vector<double> flat;
  flat.reserve(param_count());
  for_each_gate(*this, [&](const GateParams& gate) {
    append(flat, gate.recurrent);
    append(flat, gate.input);
    append(flat, gate.bias);
  });
  append(flat, readout_weight);
  flat.push_back(readout_bias);
  return flat;
}

void LstmParams::assign_from_flat(std::span<const double> flat) {
  if (flat.size() != param_count()) {
    throw Error::usage("lstm params: flat vector has wrong length");
  }
  for_each_gate(*this, [&](GateParams& gate) {
    take(flat, gate.recurrent);
    take(flat, gate.input);
    take(flat, gate.bias);
  });
  take(flat, readout_weight);
  readout_bias = flat[0];
}

LstmParams LstmParams::zeros_like() const {
  return zeros(input_dim, hidden_dim);
}

LstmState LstmState::zero(std::size_t hidden_dim) {
  return {Matrix(hidden_dim, 1), Matrix(hidden_dim, 1)};
}

void LstmHyper::validate() const {
  if (hidden_dim < 1 || window < 1 || epochs < 1) {
    throw Error::usage("lstm hyper: hidden_dim, window and epochs must be >= 1");
  }
  if (!(learning_rate > 0.0) || !(clip_norm > 0.0)) {
    throw Error::usage("lstm hyper: learning rate and clip norm must be > 0");
  }
}

namespace {

// Everything the backward pass needs from one forward step.
struct StepTrace {
  Matrix x;
  Matrix y_prev, s_prev;
  Matrix cand, gate_in, gate_skip, gate_out;  // post-activation
  Matrix s, tanh_s, y;
  double prediction = 0.0;
};

// Fused recurrence step; this sits inside the training hot loop, so the gate
// math is written out directly instead of composing matrix temporaries.
StepTrace cell_step(const LstmParams& p, const Matrix& x,
                    const LstmState& prev) {
  if (x.rows() != p.input_dim || x.cols() != 1) {
    throw Error::usage("lstm cell: input shape mismatch");
  }
  if (prev.output.rows() != p.hidden_dim || prev.cell.rows() != p.hidden_dim) {
    throw Error::usage("lstm cell: state shape mismatch");
  }
  const std::size_t hidden = p.hidden_dim;
  const std::size_t input = p.input_dim;
  StepTrace t;
  t.x = x;
  t.y_prev = prev.output;
  t.s_prev = prev.cell;
  t.cand = Matrix(hidden, 1);
  t.gate_in = Matrix(hidden, 1);
  t.gate_skip = Matrix(hidden, 1);
  t.gate_out = Matrix(hidden, 1);
  t.s = Matrix(hidden, 1);
  t.tanh_s = Matrix(hidden, 1);
  t.y = Matrix(hidden, 1);

  const double* y_prev = prev.output.values().data();
  const double* s_prev = prev.cell.values().data();
  const double* x_in = x.values().data();
  const auto pre = [&](const GateParams& g, std::size_t i) {
    const double* rec = g.recurrent.values().data() + i * hidden;
    const double* inw = g.input.values().data() + i * input;
    double acc = g.bias.values()[i];
    for (std::size_t j = 0; j < hidden; ++j) acc += rec[j] * y_prev[j];
    for (std::size_t k = 0; k < input; ++k) acc += inw[k] * x_in[k];
    return acc;
  };
  const auto sig = [](double v) { return 1.0 / (1.0 + std::exp(-v)); };

  double prediction = p.readout_bias;
  for (std::size_t i = 0; i < hidden; ++i) {
    const double cand = std::tanh(pre(p.candidate, i));
    const double gate_in = sig(pre(p.input_gate, i));
    const double gate_skip = sig(pre(p.skip_gate, i));
    const double gate_out = sig(pre(p.output_gate, i));
    const double s = gate_skip * s_prev[i] + gate_in * cand;
    const double tanh_s = std::tanh(s);
    const double y = gate_out * tanh_s;
    t.cand(i, 0) = cand;
    t.gate_in(i, 0) = gate_in;
    t.gate_skip(i, 0) = gate_skip;
    t.gate_out(i, 0) = gate_out;
    t.s(i, 0) = s;
    t.tanh_s(i, 0) = tanh_s;
    t.y(i, 0) = y;
    prediction += p.readout_weight(0, i) * y;
  }
  t.prediction = prediction;
  return t;
}

}  // namespace

LstmState lstm_cell_forward(const LstmParams& params, const Matrix& x,
                            const LstmState& prev) {
  const StepTrace t = cell_step(params, x, prev);
  return {t.y, t.s};
}

SequenceResult lstm_sequence_forward(const LstmParams& params,
                                     std::span<const double> inputs) {
  if (inputs.empty()) throw Error::data("lstm forward: empty sequence");
  LstmState state = LstmState::zero(params.hidden_dim);
  SequenceResult result;
  result.predictions.reserve(inputs.size());
  for (double value : inputs) {
    const StepTrace t =
        cell_step(params, Matrix(params.input_dim, 1, {value}), state);
    state = {t.y, t.s};
    result.predictions.push_back(t.prediction);
  }
  result.final_state = std::move(state);
  return result;
}

double mse_loss(std::span<const double> predicted,
                std::span<const double> target) {
  if (predicted.empty() || predicted.size() != target.size()) {
    throw Error::data("mse_loss: inputs must be non-empty and equal length");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const double e = predicted[i] - target[i];
    sum += e * e;
  }
  return sum / static_cast<double>(predicted.size());
}

std::pair<double, LstmParams> lstm_backprop(const LstmParams& params,
                                            std::span<const double> inputs,
                                            std::span<const double> targets) {
  if (inputs.empty() || inputs.size() != targets.size()) {
    throw Error::data("lstm_backprop: inputs and targets must match");
  }
  const std::size_t steps = inputs.size();
  const std::size_t hidden = params.hidden_dim;

  std::vector<StepTrace> trace;
  trace.reserve(steps);
  LstmState state = LstmState::zero(hidden);
  for (std::size_t t = 0; t < steps; ++t) {
    trace.push_back(
        cell_step(params, Matrix(params.input_dim, 1, {inputs[t]}), state));
    state = {trace.back().y, trace.back().s};
    if (!all_finite(trace.back().s) || !all_finite(trace.back().y)) {
      throw Error::numeric("lstm_backprop: non-finite state at step " +
                           std::to_string(t));
    }
  }

  std::vector<double> predictions(steps);
  for (std::size_t t = 0; t < steps; ++t) predictions[t] = trace[t].prediction;
  const double loss = mse_loss(predictions, targets);

  LstmParams grads = params.zeros_like();
  Matrix dy_next(hidden, 1);  // dL/dy_t carried from step t+1
  Matrix ds_next(hidden, 1);  // dL/ds_t carried from step t+1

  for (std::size_t t = steps; t-- > 0;) {
    const StepTrace& tr = trace[t];
    const double dpred = 2.0 * (tr.prediction - targets[t]) /
                         static_cast<double>(steps);

    // dL/dy_t: readout contribution plus whatever flowed back from t+1.
    Matrix dy = dy_next;
    for (std::size_t i = 0; i < hidden; ++i) {
      dy(i, 0) += params.readout_weight(0, i) * dpred;
    }
    grads.readout_bias += dpred;
    for (std::size_t i = 0; i < hidden; ++i) {
      grads.readout_weight(0, i) += dpred * tr.y(i, 0);
    }

    // y = gate_out o tanh(s)
    Matrix ds = ds_next;
    Matrix da_out(hidden, 1);
    for (std::size_t i = 0; i < hidden; ++i) {
      const double o = tr.gate_out(i, 0);
      da_out(i, 0) = dy(i, 0) * tr.tanh_s(i, 0) * o * (1.0 - o);
      ds(i, 0) += dy(i, 0) * o * (1.0 - tr.tanh_s(i, 0) * tr.tanh_s(i, 0));
    }

    // s = gate_skip o s_prev + gate_in o cand
    Matrix da_skip(hidden, 1), da_in(hidden, 1), da_cand(hidden, 1);
    for (std::size_t i = 0; i < hidden; ++i) {
      const double f = tr.gate_skip(i, 0);
      const double g = tr.gate_in(i, 0);
      const double c = tr.cand(i, 0);
      da_skip(i, 0) = ds(i, 0) * tr.s_prev(i, 0) * f * (1.0 - f);
      da_in(i, 0) = ds(i, 0) * c * g * (1.0 - g);
      da_cand(i, 0) = ds(i, 0) * g * (1.0 - c * c);
    }

    Matrix dy_prev(hidden, 1);
    const auto accumulate = [&](GateParams& grad_gate,
                                const GateParams& param_gate,
                                const Matrix& da) {
      for (std::size_t i = 0; i < hidden; ++i) {
        const double d = da(i, 0);
        if (d == 0.0) continue;
        grad_gate.bias(i, 0) += d;
        for (std::size_t j = 0; j < hidden; ++j) {
          grad_gate.recurrent(i, j) += d * tr.y_prev(j, 0);
          dy_prev(j, 0) += param_gate.recurrent(i, j) * d;
        }
        for (std::size_t j = 0; j < params.input_dim; ++j) {
          grad_gate.input(i, j) += d * tr.x(j, 0);
        }
      }
    };
    accumulate(grads.candidate, params.candidate, da_cand);
    accumulate(grads.input_gate, params.input_gate, da_in);
    accumulate(grads.skip_gate, params.skip_gate, da_skip);
    accumulate(grads.output_gate, params.output_gate, da_out);

    Matrix ds_prev(hidden, 1);
    for (std::size_t i = 0; i < hidden; ++i) {
      ds_prev(i, 0) = ds(i, 0) * tr.gate_skip(i, 0);
    }
    dy_next = std::move(dy_prev);
    ds_next = std::move(ds_prev);
  }
  return {loss, std::move(grads)};
}

namespace {

// Per-pair sequence targets: each window value predicts its successor and the
// final step predicts the held-out next value.
std::vector<double> pair_targets(const WindowSample& sample) {
  std::vector<double> targets(sample.first.begin() + 1, sample.first.end());
  targets.push_back(sample.second);
  return targets;
}

double dataset_mse(const LstmParams& params,
                   std::span<const WindowSample> samples) {
  double total = 0.0;
  for (const WindowSample& sample : samples) {
    const auto result = lstm_sequence_forward(params, sample.first);
    total += mse_loss(result.predictions, pair_targets(sample));
  }
  return total / static_cast<double>(samples.size());
}

}  // namespace

LstmTrainResult train_lstm(std::span<const WindowSample> train,
                           std::span<const WindowSample> heldout,
                           const LstmHyper& hyper) {
  hyper.validate();
  if (train.empty()) throw Error::data("train_lstm: no training pairs");
  for (const WindowSample& sample : train) {
    if (sample.first.size() != hyper.window) {
      throw Error::usage("train_lstm: window length mismatch");
    }
  }

  SeededRng rng(hyper.seed);
  LstmParams params = LstmParams::init(1, hyper.hidden_dim, rng);
  AdamConfig adam_config;
  adam_config.alpha = hyper.learning_rate;
  AdamState adam(params.param_count(), adam_config);

  LstmTrainResult result;
  result.train_mse.reserve(hyper.epochs);
  const double inv_n = 1.0 / static_cast<double>(train.size());

  for (std::size_t epoch = 0; epoch < hyper.epochs; ++epoch) {
    std::vector<double> grad_sum(params.param_count(), 0.0);
    double epoch_loss = 0.0;
    for (const WindowSample& sample : train) {
      auto [loss, grads] = lstm_backprop(params, sample.first,
                                         pair_targets(sample));
      epoch_loss += loss;
      const std::vector<double> flat = grads.flatten();
      for (std::size_t i = 0; i < grad_sum.size(); ++i) {
        grad_sum[i] += flat[i] * inv_n;
      }
    }
    epoch_loss *= inv_n;
    if (!std::isfinite(epoch_loss)) {
      throw Error::numeric("train_lstm: loss diverged at epoch " +
                           std::to_string(epoch));
    }

    double norm_sq = 0.0;
    for (double g : grad_sum) norm_sq += g * g;
    const double norm = std::sqrt(norm_sq);
    if (norm > hyper.clip_norm) {
      const double rescale = hyper.clip_norm / norm;
      for (double& g : grad_sum) g *= rescale;
    }

    std::vector<double> flat_params = params.flatten();
    adam_step(flat_params, grad_sum, adam, "lstm");
    params.assign_from_flat(flat_params);

    result.train_mse.push_back(dataset_mse(params, train));
    if (!heldout.empty()) {
      result.test_mse.push_back(dataset_mse(params, heldout));
    }
  }
  result.params = std::move(params);
  return result;
}

std::vector<double> lstm_generate(const LstmParams& params,
                                  const MinMaxScaler& scaler,
                                  std::span<const double> seed_window,
                                  std::size_t horizon) {
  if (seed_window.empty()) throw Error::data("lstm_generate: empty window");
  std::vector<double> window = scaler.scale(seed_window);
  std::vector<double> out;
  out.reserve(horizon);
  for (std::size_t step = 0; step < horizon; ++step) {
    const auto result = lstm_sequence_forward(params, window);
    const double next = result.predictions.back();
    out.push_back(scaler.unscale(next));
    window.erase(window.begin());
    window.push_back(next);
  }
  return out;
}

std::vector<double> lstm_predict_day_one_step(
    const LstmParams& params, const MinMaxScaler& scaler,
    std::span<const double> seed_window, std::span<const double> day_actuals) {
  if (seed_window.empty()) {
    throw Error::data("lstm one-step: empty seed window");
  }
  if (day_actuals.size() != 24) {
    throw Error::data("lstm one-step: need all 24 actual hours of the day");
  }
  std::vector<double> history = scaler.scale(seed_window);
  const std::vector<double> actuals = scaler.scale(day_actuals);
  const std::size_t window = seed_window.size();
  std::vector<double> out;
  out.reserve(24);
  for (std::size_t hour = 0; hour < 24; ++hour) {
    const std::span<const double> view(history.data() + hour, window);
    const auto result = lstm_sequence_forward(params, view);
    out.push_back(scaler.unscale(result.predictions.back()));
    history.push_back(actuals[hour]);
  }
  return out;
}

DayProfile lstm_generate_profile(const LstmParams& params,
                                 const MinMaxScaler& scaler,
                                 std::span<const double> seed_window,
                                 Date date, const std::string& zone) {
  const std::vector<double> prices =
      lstm_generate(params, scaler, seed_window, 24);
  DayProfile profile;
  profile.date = date;
  profile.zone = zone;
  profile.field = FieldKind::avg;
  for (std::size_t h = 0; h < 24; ++h) profile.values[h] = prices[h];
  return profile;
}

}  // namespace idprice
