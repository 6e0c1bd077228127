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

#include "numerics.hpp"

namespace idprice {

enum class Activation { none, relu, leaky_relu, tanh, sigmoid };

// Feed-forward layer over (channels, length) signals. Dense layers flatten
// their input and emit a new (channels, length) shape; conv layers slide over
// the length axis.
struct LayerSpec {
  enum class Kind { dense, conv1d, tconv1d };
  Kind kind = Kind::dense;
  std::size_t out_channels = 1;
  std::size_t out_length = 1;  // dense only; conv lengths are derived
  std::size_t kernel = 1;
  std::size_t stride = 1;
  std::size_t pad = 0;
  Activation activation = Activation::none;

  static LayerSpec dense(std::size_t out_channels, std::size_t out_length,
                         Activation activation);
  static LayerSpec dense(std::size_t out, Activation activation) {
    return dense(out, 1, activation);
  }
  static LayerSpec conv1d(std::size_t out_channels, std::size_t kernel,
                          std::size_t stride, std::size_t pad,
                          Activation activation);
  static LayerSpec tconv1d(std::size_t out_channels, std::size_t kernel,
                           std::size_t stride, std::size_t pad,
                           Activation activation);
};

// A small sequential network with hand-written forward and backward passes.
// Parameters live in one flat vector so the optimizer and the checkpoint
// format can treat every architecture uniformly.
class Net {
 public:
  Net(std::size_t in_channels, std::size_t in_length,
      std::vector<LayerSpec> specs);

  void init_params(SeededRng& rng);  // uniform(-k, k), k = 1/sqrt(fan_in)

  std::size_t input_size() const { return in_channels_ * in_length_; }
  std::size_t output_size() const;
  std::size_t param_count() const { return params_.size(); }
  std::vector<double>& params() { return params_; }
  const std::vector<double>& params() const { return params_; }
  const std::vector<LayerSpec>& specs() const { return specs_; }
  std::size_t in_channels() const { return in_channels_; }
  std::size_t in_length() const { return in_length_; }

  std::vector<double> forward(std::span<const double> input) const;

  // Forward pass with cached per-layer values for backward.
  struct Trace {
    std::vector<std::vector<double>> inputs;   // per layer
    std::vector<std::vector<double>> outputs;  // post-activation per layer
  };
  Trace forward_trace(std::span<const double> input) const;

  // Accumulates parameter gradients into `param_grads` (when non-null) and
  // returns the gradient with respect to the network input.
  std::vector<double> backward(const Trace& trace,
                               std::span<const double> output_grad,
                               std::vector<double>* param_grads) const;

 private:
  struct LayerMeta {
    std::size_t in_channels, in_length, out_channels, out_length;
    std::size_t weight_offset, weight_count, bias_offset;
  };

  std::size_t in_channels_;
  std::size_t in_length_;
  std::vector<LayerSpec> specs_;
  std::vector<LayerMeta> meta_;
  std::vector<double> params_;
};

struct GanHyper {
  std::size_t latent_dim = 16;
  bool dense_arch = false;  // dense fallback instead of the conv pair
  std::vector<std::size_t> dense_widths = {64, 64};
  std::size_t profile_length = 24;
  std::size_t epochs = 2000;
  std::size_t batch_size = 32;
  double lr_generator = 1e-3;
  double lr_discriminator = 1e-3;
  double adam_beta1 = 0.5;
  std::uint64_t seed = 0;

  void validate() const;
};

// latent -> dense -> (8ch x 6) -> two stride-2 transposed convs -> 24, tanh.
// The dense fallback is latent -> 64 -> 64 -> 24.
Net make_generator(const GanHyper& hyper);
// 24 -> two stride-2 convs -> dense -> sigmoid (leaky slope 0.2), or the
// mirrored dense stack.
Net make_discriminator(const GanHyper& hyper);

std::vector<double> generator_forward(const Net& generator,
                                      std::span<const double> latent);
double discriminator_forward(const Net& discriminator,
                             std::span<const double> profile);

inline constexpr double kGanLogClamp = 1e-7;

// mean[log d_real] + mean[log(1 - d_fake)], inputs clamped away from {0,1}.
// Zero at the global optimum, negative everywhere else.
double gan_value(std::span<const double> d_real,
                 std::span<const double> d_fake);

// Discriminator ascent objective as a loss to minimize:
//   -(mean log D(x) + mean log(1 - D(x_fake))).
double discriminator_loss_and_grad(
    const Net& discriminator, const std::vector<std::vector<double>>& real,
    const std::vector<std::vector<double>>& fake, std::vector<double>* grad);

// Non-saturating generator loss: -mean log D(G(l)).
double generator_loss_and_grad(const Net& generator, const Net& discriminator,
                               const std::vector<std::vector<double>>& latents,
                               std::vector<double>* grad);

struct GanTrainResult {
  Net generator;
  Net discriminator;
  std::vector<double> value_history;  // minimax value per epoch
};

// Alternating 1:1 updates on profiles already scaled to [-1, 1].
GanTrainResult train_dcgan(const std::vector<std::vector<double>>& profiles,
                           const GanHyper& hyper);

// n latent draws -> generator -> inverse scaling to EUR/MWh.
std::vector<std::vector<double>> sample_prices(const Net& generator,
                                               const MinMaxScaler& scaler,
                                               std::size_t n, SeededRng& rng);

}  // namespace idprice
