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

#include "dcgan.hpp"

#include <algorithm>
#include <cmath>

#include "error.hpp"

namespace idprice {

namespace {

constexpr double kLeakySlope = 0.2;

double activate(Activation act, double x) {
  switch (act) {
    case Activation::none:
      return x;
    case Activation::relu:
      return x > 0.0 ? x : 0.0;
    case Activation::leaky_relu:
      return x > 0.0 ? x : kLeakySlope * x;
    case Activation::tanh:
      return std::tanh(x);
    case Activation::sigmoid:
      return 1.0 / (1.0 + std::exp(-x));
  }
  return x;
}

// Derivative expressed through the post-activation value, which is all the
// trace keeps.
double activate_grad(Activation act, double out) {
  switch (act) {
    case Activation::none:
      return 1.0;
    case Activation::relu:
      return out > 0.0 ? 1.0 : 0.0;
    case Activation::leaky_relu:
      return out > 0.0 ? 1.0 : kLeakySlope;
    case Activation::tanh:
      return 1.0 - out * out;
    case Activation::sigmoid:
      return out * (1.0 - out);
  }
  return 1.0;
}

std::size_t conv_out_length(std::size_t in_length, std::size_t kernel,
                            std::size_t stride, std::size_t pad) {
  const std::size_t padded = in_length + 2 * pad;
  if (padded < kernel) throw Error::usage("conv1d: kernel larger than input");
  return (padded - kernel) / stride + 1;
}

std::size_t tconv_out_length(std::size_t in_length, std::size_t kernel,
                             std::size_t stride, std::size_t pad) {
  const std::size_t grown = (in_length - 1) * stride + kernel;
  if (grown < 2 * pad) throw Error::usage("tconv1d: padding too large");
  return grown - 2 * pad;
}

}  // namespace

LayerSpec LayerSpec::dense(std::size_t out_channels, std::size_t out_length,
                           Activation activation) {
  LayerSpec spec;
  spec.kind = Kind::dense;
  spec.out_channels = out_channels;
  spec.out_length = out_length;
  spec.activation = activation;
  return spec;
}

LayerSpec LayerSpec::conv1d(std::size_t out_channels, std::size_t kernel,
                            std::size_t stride, std::size_t pad,
                            Activation activation) {
  LayerSpec spec;
  spec.kind = Kind::conv1d;
  spec.out_channels = out_channels;
  spec.kernel = kernel;
  spec.stride = stride;
  spec.pad = pad;
  spec.activation = activation;
  return spec;
}

LayerSpec LayerSpec::tconv1d(std::size_t out_channels, std::size_t kernel,
                             std::size_t stride, std::size_t pad,
                             Activation activation) {
  LayerSpec spec = conv1d(out_channels, kernel, stride, pad, activation);
  spec.kind = Kind::tconv1d;
  return spec;
}

Net::Net(std::size_t in_channels, std::size_t in_length,
         std::vector<LayerSpec> specs)
    : in_channels_(in_channels), in_length_(in_length), specs_(std::move(specs)) {
  if (in_channels_ == 0 || in_length_ == 0 || specs_.empty()) {
    throw Error::usage("net: empty input or layer list");
  }
  std::size_t channels = in_channels_;
  std::size_t length = in_length_;
  std::size_t offset = 0;
  for (const LayerSpec& spec : specs_) {
    LayerMeta meta{};
    meta.in_channels = channels;
    meta.in_length = length;
    meta.out_channels = spec.out_channels;
    switch (spec.kind) {
      case LayerSpec::Kind::dense:
        meta.out_length = spec.out_length;
        meta.weight_count =
            spec.out_channels * spec.out_length * channels * length;
        break;
      case LayerSpec::Kind::conv1d:
        meta.out_length = conv_out_length(length, spec.kernel, spec.stride,
                                          spec.pad);
        meta.weight_count = spec.out_channels * channels * spec.kernel;
        break;
      case LayerSpec::Kind::tconv1d:
        meta.out_length = tconv_out_length(length, spec.kernel, spec.stride,
                                           spec.pad);
        meta.weight_count = channels * spec.out_channels * spec.kernel;
        break;
    }
    meta.weight_offset = offset;
    meta.bias_offset = offset + meta.weight_count;
    offset = meta.bias_offset + spec.out_channels;
    meta_.push_back(meta);
    channels = meta.out_channels;
    length = meta.out_length;
  }
  params_.assign(offset, 0.0);
}

std::size_t Net::output_size() const {
  return meta_.back().out_channels * meta_.back().out_length;
}

void Net::init_params(SeededRng& rng) {
  for (std::size_t layer = 0; layer < specs_.size(); ++layer) {
    const LayerSpec& spec = specs_[layer];
    const LayerMeta& meta = meta_[layer];
    std::size_t fan_in = meta.in_channels * meta.in_length;
    if (spec.kind != LayerSpec::Kind::dense) {
      fan_in = meta.in_channels * spec.kernel;
    }
    const double k = 1.0 / std::sqrt(static_cast<double>(fan_in));
    for (std::size_t i = 0; i < meta.weight_count; ++i) {
      params_[meta.weight_offset + i] = rng.uniform(-k, k);
    }
    for (std::size_t i = 0; i < meta.out_channels; ++i) {
      params_[meta.bias_offset + i] = 0.0;
    }
  }
}

Net::Trace Net::forward_trace(std::span<const double> input) const {
  if (input.size() != input_size()) {
    throw Error::usage("net forward: input size mismatch, expected " +
                       std::to_string(input_size()) + " got " +
                       std::to_string(input.size()));
  }
  Trace trace;
  trace.inputs.reserve(specs_.size());
  trace.outputs.reserve(specs_.size());
  std::vector<double> current(input.begin(), input.end());

  for (std::size_t layer = 0; layer < specs_.size(); ++layer) {
    const LayerSpec& spec = specs_[layer];
    const LayerMeta& meta = meta_[layer];
    const double* w = params_.data() + meta.weight_offset;
    const double* b = params_.data() + meta.bias_offset;
    std::vector<double> out(meta.out_channels * meta.out_length, 0.0);

    switch (spec.kind) {
      case LayerSpec::Kind::dense: {
        const std::size_t in_size = meta.in_channels * meta.in_length;
        const std::size_t out_size = out.size();
        for (std::size_t o = 0; o < out_size; ++o) {
          double acc = 0.0;
          const double* row = w + o * in_size;
          for (std::size_t i = 0; i < in_size; ++i) acc += row[i] * current[i];
          out[o] = acc;
        }
        // Bias is per output channel; for (channels x length) outputs each
        // channel shares one bias across positions.
        for (std::size_t oc = 0; oc < meta.out_channels; ++oc) {
          for (std::size_t p = 0; p < meta.out_length; ++p) {
            out[oc * meta.out_length + p] += b[oc];
          }
        }
        break;
      }
      case LayerSpec::Kind::conv1d: {
        for (std::size_t oc = 0; oc < meta.out_channels; ++oc) {
          for (std::size_t p = 0; p < meta.out_length; ++p) {
            double acc = b[oc];
            for (std::size_t ic = 0; ic < meta.in_channels; ++ic) {
              const double* kw =
                  w + (oc * meta.in_channels + ic) * spec.kernel;
              for (std::size_t k = 0; k < spec.kernel; ++k) {
                const std::ptrdiff_t q =
                    static_cast<std::ptrdiff_t>(p * spec.stride + k) -
                    static_cast<std::ptrdiff_t>(spec.pad);
                if (q < 0 || q >= static_cast<std::ptrdiff_t>(meta.in_length)) {
                  continue;
                }
                acc += kw[k] * current[ic * meta.in_length +
                                       static_cast<std::size_t>(q)];
              }
            }
            out[oc * meta.out_length + p] = acc;
          }
        }
        break;
      }
      case LayerSpec::Kind::tconv1d: {
        for (std::size_t oc = 0; oc < meta.out_channels; ++oc) {
          for (std::size_t q = 0; q < meta.out_length; ++q) {
            out[oc * meta.out_length + q] = b[oc];
          }
        }
        for (std::size_t ic = 0; ic < meta.in_channels; ++ic) {
          for (std::size_t p = 0; p < meta.in_length; ++p) {
            const double x = current[ic * meta.in_length + p];
            if (x == 0.0) continue;
            for (std::size_t oc = 0; oc < meta.out_channels; ++oc) {
              const double* kw =
                  w + (ic * meta.out_channels + oc) * spec.kernel;
              for (std::size_t k = 0; k < spec.kernel; ++k) {
                const std::ptrdiff_t q =
                    static_cast<std::ptrdiff_t>(p * spec.stride + k) -
                    static_cast<std::ptrdiff_t>(spec.pad);
                if (q < 0 ||
                    q >= static_cast<std::ptrdiff_t>(meta.out_length)) {
                  continue;
                }
                out[oc * meta.out_length + static_cast<std::size_t>(q)] +=
                    kw[k] * x;
              }
            }
          }
        }
        break;
      }
    }

    for (double& v : out) v = activate(spec.activation, v);
    trace.inputs.push_back(std::move(current));
    current = out;
    trace.outputs.push_back(current);
  }
  return trace;
}

std::vector<double> Net::forward(std::span<const double> input) const {
  return forward_trace(input).outputs.back();
}

std::vector<double> Net::backward(const Trace& trace,
                                  std::span<const double> output_grad,
                                  std::vector<double>* param_grads) const {
  if (param_grads && param_grads->size() != params_.size()) {
    throw Error::usage("net backward: gradient buffer size mismatch");
  }
  std::vector<double> dout(output_grad.begin(), output_grad.end());

  for (std::size_t layer = specs_.size(); layer-- > 0;) {
    const LayerSpec& spec = specs_[layer];
    const LayerMeta& meta = meta_[layer];
    const std::vector<double>& in = trace.inputs[layer];
    const std::vector<double>& out = trace.outputs[layer];
    if (dout.size() != out.size()) {
      throw Error::usage("net backward: output gradient size mismatch");
    }
    for (std::size_t i = 0; i < dout.size(); ++i) {
      dout[i] *= activate_grad(spec.activation, out[i]);
    }

    const double* w = params_.data() + meta.weight_offset;
    double* gw = param_grads
                     ? param_grads->data() + meta.weight_offset
                     : nullptr;
    double* gb = param_grads ? param_grads->data() + meta.bias_offset : nullptr;
    std::vector<double> din(in.size(), 0.0);

    switch (spec.kind) {
      case LayerSpec::Kind::dense: {
        const std::size_t in_size = in.size();
        for (std::size_t o = 0; o < dout.size(); ++o) {
          const double d = dout[o];
          if (d == 0.0) continue;
          const double* row = w + o * in_size;
          if (gw) {
            double* grow = gw + o * in_size;
            for (std::size_t i = 0; i < in_size; ++i) grow[i] += d * in[i];
          }
          for (std::size_t i = 0; i < in_size; ++i) din[i] += row[i] * d;
        }
        if (gb) {
          for (std::size_t oc = 0; oc < meta.out_channels; ++oc) {
            for (std::size_t p = 0; p < meta.out_length; ++p) {
              gb[oc] += dout[oc * meta.out_length + p];
            }
          }
        }
        break;
      }
      case LayerSpec::Kind::conv1d: {
        for (std::size_t oc = 0; oc < meta.out_channels; ++oc) {
          for (std::size_t p = 0; p < meta.out_length; ++p) {
            const double d = dout[oc * meta.out_length + p];
            if (d == 0.0) continue;
            if (gb) gb[oc] += d;
            for (std::size_t ic = 0; ic < meta.in_channels; ++ic) {
              const std::size_t base = (oc * meta.in_channels + ic) * spec.kernel;
              for (std::size_t k = 0; k < spec.kernel; ++k) {
                const std::ptrdiff_t q =
                    static_cast<std::ptrdiff_t>(p * spec.stride + k) -
                    static_cast<std::ptrdiff_t>(spec.pad);
                if (q < 0 || q >= static_cast<std::ptrdiff_t>(meta.in_length)) {
                  continue;
                }
                const std::size_t idx =
                    ic * meta.in_length + static_cast<std::size_t>(q);
                if (gw) gw[base + k] += d * in[idx];
                din[idx] += w[base + k] * d;
              }
            }
          }
        }
        break;
      }
      case LayerSpec::Kind::tconv1d: {
        if (gb) {
          for (std::size_t oc = 0; oc < meta.out_channels; ++oc) {
            for (std::size_t q = 0; q < meta.out_length; ++q) {
              gb[oc] += dout[oc * meta.out_length + q];
            }
          }
        }
        for (std::size_t ic = 0; ic < meta.in_channels; ++ic) {
          for (std::size_t p = 0; p < meta.in_length; ++p) {
            const std::size_t idx = ic * meta.in_length + p;
            for (std::size_t oc = 0; oc < meta.out_channels; ++oc) {
              const std::size_t base = (ic * meta.out_channels + oc) * spec.kernel;
              for (std::size_t k = 0; k < spec.kernel; ++k) {
                const std::ptrdiff_t q =
                    static_cast<std::ptrdiff_t>(p * spec.stride + k) -
                    static_cast<std::ptrdiff_t>(spec.pad);
                if (q < 0 ||
                    q >= static_cast<std::ptrdiff_t>(meta.out_length)) {
                  continue;
                }
                const double d =
                    dout[oc * meta.out_length + static_cast<std::size_t>(q)];
                if (gw) gw[base + k] += d * in[idx];
                din[idx] += w[base + k] * d;
              }
            }
          }
        }
        break;
      }
    }
    dout = std::move(din);
  }
  return dout;
}

void GanHyper::validate() const {
  if (latent_dim < 1 || profile_length < 1 || epochs < 1 || batch_size < 1) {
    throw Error::usage("gan hyper: sizes must be >= 1");
  }
  if (!(lr_generator > 0.0) || !(lr_discriminator > 0.0)) {
    throw Error::usage("gan hyper: learning rates must be > 0");
  }
  if (dense_widths.empty()) {
    throw Error::usage("gan hyper: dense widths must be non-empty");
  }
}

Net make_generator(const GanHyper& hyper) {
  hyper.validate();
  if (hyper.dense_arch) {
    std::vector<LayerSpec> specs;
    for (std::size_t width : hyper.dense_widths) {
      specs.push_back(LayerSpec::dense(width, Activation::relu));
    }
    specs.push_back(LayerSpec::dense(hyper.profile_length, Activation::tanh));
    return Net(1, hyper.latent_dim, std::move(specs));
  }
  if (hyper.profile_length % 4 != 0) {
    throw Error::usage("gan conv generator needs a profile length divisible by 4");
  }
  const std::size_t seed_length = hyper.profile_length / 4;
  std::vector<LayerSpec> specs;
  specs.push_back(LayerSpec::dense(8, seed_length, Activation::relu));
  specs.push_back(LayerSpec::tconv1d(4, 4, 2, 1, Activation::relu));
  specs.push_back(LayerSpec::tconv1d(1, 4, 2, 1, Activation::tanh));
  return Net(1, hyper.latent_dim, std::move(specs));
}

Net make_discriminator(const GanHyper& hyper) {
  hyper.validate();
  if (hyper.dense_arch) {
    std::vector<LayerSpec> specs;
    for (std::size_t width : hyper.dense_widths) {
      specs.push_back(LayerSpec::dense(width, Activation::leaky_relu));
    }
    specs.push_back(LayerSpec::dense(1, Activation::sigmoid));
    return Net(1, hyper.profile_length, std::move(specs));
  }
  if (hyper.profile_length % 4 != 0) {
    throw Error::usage("gan conv discriminator needs a profile length divisible by 4");
  }
  std::vector<LayerSpec> specs;
  specs.push_back(LayerSpec::conv1d(8, 4, 2, 1, Activation::leaky_relu));
  specs.push_back(LayerSpec::conv1d(16, 4, 2, 1, Activation::leaky_relu));
  specs.push_back(LayerSpec::dense(1, Activation::sigmoid));
  return Net(1, hyper.profile_length, std::move(specs));
}

std::vector<double> generator_forward(const Net& generator,
                                      std::span<const double> latent) {
  return generator.forward(latent);
}

double discriminator_forward(const Net& discriminator,
                             std::span<const double> profile) {
  const auto out = discriminator.forward(profile);
  if (out.size() != 1) {
    throw Error::usage("discriminator must have a scalar output");
  }
  return out[0];
}

double gan_value(std::span<const double> d_real,
                 std::span<const double> d_fake) {
  if (d_real.empty() || d_fake.empty()) {
    throw Error::data("gan_value: empty batch");
  }
  const auto clamp = [](double v) {
    return std::clamp(v, kGanLogClamp, 1.0 - kGanLogClamp);
  };
  double real_term = 0.0;
  for (double v : d_real) real_term += std::log(clamp(v));
  double fake_term = 0.0;
  for (double v : d_fake) fake_term += std::log(1.0 - clamp(v));
  return real_term / static_cast<double>(d_real.size()) +
         fake_term / static_cast<double>(d_fake.size());
}

double discriminator_loss_and_grad(
    const Net& discriminator, const std::vector<std::vector<double>>& real,
    const std::vector<std::vector<double>>& fake, std::vector<double>* grad) {
  if (real.empty() || fake.empty()) {
    throw Error::data("discriminator loss: empty batch");
  }
  double loss = 0.0;
  const double inv_real = 1.0 / static_cast<double>(real.size());
  const double inv_fake = 1.0 / static_cast<double>(fake.size());
  for (const auto& x : real) {
    const Net::Trace trace = discriminator.forward_trace(x);
    const double y = std::max(trace.outputs.back()[0], kGanLogClamp);
    loss -= std::log(y) * inv_real;
    const double dy = -inv_real / y;
    discriminator.backward(trace, std::span<const double>(&dy, 1), grad);
  }
  for (const auto& x : fake) {
    const Net::Trace trace = discriminator.forward_trace(x);
    const double y = std::min(trace.outputs.back()[0], 1.0 - kGanLogClamp);
    loss -= std::log(1.0 - y) * inv_fake;
    const double dy = inv_fake / (1.0 - y);
    discriminator.backward(trace, std::span<const double>(&dy, 1), grad);
  }
  return loss;
}

double generator_loss_and_grad(const Net& generator, const Net& discriminator,
                               const std::vector<std::vector<double>>& latents,
                               std::vector<double>* grad) {
  if (latents.empty()) throw Error::data("generator loss: empty batch");
  double loss = 0.0;
  const double inv_n = 1.0 / static_cast<double>(latents.size());
  for (const auto& latent : latents) {
    const Net::Trace g_trace = generator.forward_trace(latent);
    const Net::Trace d_trace =
        discriminator.forward_trace(g_trace.outputs.back());
    const double y = std::max(d_trace.outputs.back()[0], kGanLogClamp);
    loss -= std::log(y) * inv_n;
    const double dy = -inv_n / y;
    // Flow through the discriminator without touching its gradients.
    const std::vector<double> dx =
        discriminator.backward(d_trace, std::span<const double>(&dy, 1),
                               nullptr);
    generator.backward(g_trace, dx, grad);
  }
  return loss;
}

GanTrainResult train_dcgan(const std::vector<std::vector<double>>& profiles,
                           const GanHyper& hyper) {
  hyper.validate();
  if (profiles.empty()) throw Error::data("train_dcgan: no profiles");
  for (const auto& p : profiles) {
    if (p.size() != hyper.profile_length) {
      throw Error::data("train_dcgan: profile length mismatch");
    }
    if (!all_finite(p)) throw Error::data("train_dcgan: non-finite profile");
  }

  SeededRng rng(hyper.seed);
  Net generator = make_generator(hyper);
  Net discriminator = make_discriminator(hyper);
  generator.init_params(rng);
  discriminator.init_params(rng);

  AdamConfig g_config;
  g_config.alpha = hyper.lr_generator;
  g_config.beta1 = hyper.adam_beta1;
  AdamConfig d_config;
  d_config.alpha = hyper.lr_discriminator;
  d_config.beta1 = hyper.adam_beta1;
  AdamState g_adam(generator.param_count(), g_config);
  AdamState d_adam(discriminator.param_count(), d_config);

  const std::size_t batch = std::min(hyper.batch_size, profiles.size());
  std::vector<std::size_t> order(profiles.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  const auto draw_latents = [&](std::size_t n) {
    std::vector<std::vector<double>> latents(n);
    for (auto& l : latents) {
      l.resize(hyper.latent_dim);
      for (double& v : l) v = rng.normal();
    }
    return latents;
  };

  GanTrainResult result{generator, discriminator, {}};
  result.value_history.reserve(hyper.epochs);

  for (std::size_t epoch = 0; epoch < hyper.epochs; ++epoch) {
    // Fisher-Yates on the seeded stream keeps epochs reproducible.
    for (std::size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[rng.uniform_index(i)]);
    }
    for (std::size_t start = 0; start + batch <= order.size(); start += batch) {
      std::vector<std::vector<double>> real_batch;
      real_batch.reserve(batch);
      for (std::size_t i = 0; i < batch; ++i) {
        real_batch.push_back(profiles[order[start + i]]);
      }

      auto fake_latents = draw_latents(batch);
      std::vector<std::vector<double>> fake_batch;
      fake_batch.reserve(batch);
      for (const auto& l : fake_latents) {
        fake_batch.push_back(result.generator.forward(l));
      }

      std::vector<double> d_grad(result.discriminator.param_count(), 0.0);
      const double d_loss = discriminator_loss_and_grad(
          result.discriminator, real_batch, fake_batch, &d_grad);
      if (!std::isfinite(d_loss)) {
        throw Error::numeric("train_dcgan: discriminator loss diverged at epoch " +
                             std::to_string(epoch));
      }
      adam_step(result.discriminator.params(), d_grad, d_adam, "discriminator");

      auto g_latents = draw_latents(batch);
      std::vector<double> g_grad(result.generator.param_count(), 0.0);
      const double g_loss = generator_loss_and_grad(
          result.generator, result.discriminator, g_latents, &g_grad);
      if (!std::isfinite(g_loss)) {
        throw Error::numeric("train_dcgan: generator loss diverged at epoch " +
                             std::to_string(epoch));
      }
      adam_step(result.generator.params(), g_grad, g_adam, "generator");
    }

    // Minimax value over the full real set against fresh latents.
    std::vector<double> d_real(profiles.size());
    for (std::size_t i = 0; i < profiles.size(); ++i) {
      d_real[i] = discriminator_forward(result.discriminator, profiles[i]);
    }
    const auto eval_latents = draw_latents(profiles.size());
    std::vector<double> d_fake(eval_latents.size());
    for (std::size_t i = 0; i < eval_latents.size(); ++i) {
      d_fake[i] = discriminator_forward(
          result.discriminator, result.generator.forward(eval_latents[i]));
    }
    result.value_history.push_back(gan_value(d_real, d_fake));
  }
  return result;
}

std::vector<std::vector<double>> sample_prices(const Net& generator,
                                               const MinMaxScaler& scaler,
                                               std::size_t n, SeededRng& rng) {
  std::vector<std::vector<double>> out;
  out.reserve(n);
  std::vector<double> latent(generator.input_size());
  for (std::size_t i = 0; i < n; ++i) {
    for (double& v : latent) v = rng.normal();
    std::vector<double> profile = generator.forward(latent);
    for (double& v : profile) v = scaler.unscale(v);
    out.push_back(std::move(profile));
  }
  return out;
}

}  // namespace idprice
