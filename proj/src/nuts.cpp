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

#include "nuts.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "error.hpp"
#include "eval.hpp"

namespace idprice {

namespace {

constexpr double kLog2Pi = 1.8378770664093453;

double log_add_exp(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

double dot(std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
  return sum;
}

}  // namespace

MixtureModel MixtureModel::for_data(int components,
                                    std::span<const double> data) {
  if (components < 1 || components > 5) {
    throw Error::usage("mixture components must be in 1..5");
  }
  if (data.empty()) throw Error::data("mixture fit: empty data");
  const StatSummary stats = stat_summary(data);
  if (!(stats.stddev > 0.0)) {
    throw Error::data("mixture fit: data has zero spread");
  }
  MixtureModel model;
  model.components = components;
  model.prior_mean_loc = stats.mean;
  model.prior_mean_scale = 2.0 * stats.stddev;
  model.prior_sigma_scale = stats.stddev;
  return model;
}

MixtureModel::Constrained MixtureModel::constrain(
    std::span<const double> theta) const {
  const auto k = static_cast<std::size_t>(components);
  if (theta.size() != dim()) {
    throw Error::usage("mixture constrain: wrong parameter dimension");
  }
  Constrained out;
  out.mean.assign(theta.begin(), theta.begin() + static_cast<std::ptrdiff_t>(k));
  out.sigma.resize(k);
  out.weight.resize(k);
  for (std::size_t i = 0; i < k; ++i) out.sigma[i] = std::exp(theta[k + i]);
  double max_logit = theta[2 * k];
  for (std::size_t i = 0; i < k; ++i) {
    max_logit = std::max(max_logit, theta[2 * k + i]);
  }
  double norm = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    out.weight[i] = std::exp(theta[2 * k + i] - max_logit);
    norm += out.weight[i];
  }
  for (std::size_t i = 0; i < k; ++i) out.weight[i] /= norm;
  return out;
}

std::vector<double> MixtureModel::initial_theta(
    std::span<const double> data) const {
  const auto k = static_cast<std::size_t>(components);
  std::vector<double> theta(dim(), 0.0);
  const StatSummary stats = stat_summary(data);
  for (std::size_t i = 0; i < k; ++i) {
    const double q = 100.0 * (static_cast<double>(i) + 0.5) /
                     static_cast<double>(k);
    theta[i] = percentile(data, q);
  }
  const double log_sigma = std::log(std::max(stats.stddev, 1e-8));
  for (std::size_t i = 0; i < k; ++i) theta[k + i] = log_sigma;
  return theta;
}

double log_posterior(const MixtureModel& model, std::span<const double> theta,
                     std::span<const double> data, std::vector<double>* grad) {
  if (data.empty()) throw Error::data("log_posterior: empty data");
  const auto k = static_cast<std::size_t>(model.components);
  if (theta.size() != model.dim()) {
    throw Error::usage("log_posterior: wrong parameter dimension");
  }
  if (!all_finite(theta)) {
    throw Error::numeric("log_posterior: non-finite parameters");
  }

  const MixtureModel::Constrained c = model.constrain(theta);
  std::vector<double> log_weight(k);
  for (std::size_t j = 0; j < k; ++j) log_weight[j] = std::log(c.weight[j]);

  if (grad) grad->assign(theta.size(), 0.0);

  double value = 0.0;
  std::vector<double> terms(k);
  std::vector<double> resp_sum(k, 0.0);       // sum_i r_ij
  std::vector<double> mean_grad(k, 0.0);      // sum_i r_ij z_ij / sigma_j
  std::vector<double> log_sigma_grad(k, 0.0); // sum_i r_ij (z_ij^2 - 1)

  for (const double x : data) {
    double max_term = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < k; ++j) {
      const double z = (x - c.mean[j]) / c.sigma[j];
      terms[j] = log_weight[j] - 0.5 * kLog2Pi - std::log(c.sigma[j]) -
                 0.5 * z * z;
      max_term = std::max(max_term, terms[j]);
    }
    double sum = 0.0;
    for (std::size_t j = 0; j < k; ++j) sum += std::exp(terms[j] - max_term);
    const double lse = max_term + std::log(sum);
    value += lse;
    if (grad) {
      for (std::size_t j = 0; j < k; ++j) {
        const double r = std::exp(terms[j] - lse);
        const double z = (x - c.mean[j]) / c.sigma[j];
        resp_sum[j] += r;
        mean_grad[j] += r * z / c.sigma[j];
        log_sigma_grad[j] += r * (z * z - 1.0);
      }
    }
  }

  // Priors: Normal on means, HalfNormal on sigmas (with the log-sigma
  // Jacobian), standard Normal on weight logits.
  const double mean_var = model.prior_mean_scale * model.prior_mean_scale;
  const double sigma_var = model.prior_sigma_scale * model.prior_sigma_scale;
  for (std::size_t j = 0; j < k; ++j) {
    const double dm = c.mean[j] - model.prior_mean_loc;
    value += -0.5 * kLog2Pi - std::log(model.prior_mean_scale) -
             0.5 * dm * dm / mean_var;
    value += 0.5 * std::log(2.0 / 3.14159265358979323846) -
             std::log(model.prior_sigma_scale) -
             0.5 * c.sigma[j] * c.sigma[j] / sigma_var +
             std::log(c.sigma[j]);  // Jacobian of sigma = exp(log sigma)
    const double logit = theta[2 * k + j];
    value += -0.5 * kLog2Pi - 0.5 * logit * logit;
  }

  if (grad) {
    double resp_total = 0.0;
    for (std::size_t j = 0; j < k; ++j) resp_total += resp_sum[j];
    for (std::size_t j = 0; j < k; ++j) {
      (*grad)[j] = mean_grad[j] -
                   (c.mean[j] - model.prior_mean_loc) / mean_var;
      (*grad)[k + j] = log_sigma_grad[j] -
                       c.sigma[j] * c.sigma[j] / sigma_var + 1.0;
      // d lse_i / d logit_j = r_ij - w_j summed over data points.
      (*grad)[2 * k + j] = resp_sum[j] -
                           c.weight[j] * static_cast<double>(data.size()) -
                           theta[2 * k + j];
    }
  }

  if (!std::isfinite(value)) {
    throw Error::numeric("log_posterior: non-finite density value");
  }
  return value;
}

LogDensityFn MixtureModel::posterior(std::vector<double> data) const {
  MixtureModel model = *this;
  return [model, data = std::move(data)](std::span<const double> theta,
                                         std::vector<double>* grad) {
    return log_posterior(model, theta, data, grad);
  };
}

LeapfrogState make_leapfrog_state(const LogDensityFn& fn,
                                  std::vector<double> position,
                                  std::vector<double> momentum) {
  LeapfrogState state;
  state.position = std::move(position);
  state.momentum = std::move(momentum);
  state.grad.resize(state.position.size());
  state.logp = fn(state.position, &state.grad);
  return state;
}

LeapfrogState leapfrog(const LogDensityFn& fn, const LeapfrogState& state,
                       double eps) {
  if (eps == 0.0) throw Error::usage("leapfrog: step size must be nonzero");
  const std::size_t dim = state.position.size();
  LeapfrogState next;
  next.position.resize(dim);
  next.momentum.resize(dim);
  next.grad.resize(dim);
  // Half momentum kick, full position drift, half momentum kick.
  std::vector<double> half(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    half[i] = state.momentum[i] + 0.5 * eps * state.grad[i];
    next.position[i] = state.position[i] + eps * half[i];
  }
  next.logp = fn(next.position, &next.grad);
  for (std::size_t i = 0; i < dim; ++i) {
    next.momentum[i] = half[i] + 0.5 * eps * next.grad[i];
  }
  return next;
}

double hamiltonian(const LeapfrogState& state) {
  return -state.logp + 0.5 * dot(state.momentum, state.momentum);
}

double find_reasonable_epsilon(const LogDensityFn& fn,
                               const LeapfrogState& start, SeededRng& rng) {
  LeapfrogState state = start;
  state.momentum.resize(state.position.size());
  for (double& r : state.momentum) r = rng.normal();
  const double h0 = hamiltonian(state);

  const auto accept_prob = [&](double eps) {
    const LeapfrogState next = leapfrog(fn, state, eps);
    const double h = hamiltonian(next);
    if (!std::isfinite(h)) return 0.0;
    return std::exp(h0 - h);
  };

  double eps = 1.0;
  const double direction = accept_prob(eps) > 0.5 ? 1.0 : -1.0;
  for (int iter = 0; iter < 100; ++iter) {
    const double prob = accept_prob(eps);
    const bool keep_going = direction > 0.0 ? prob > 0.5 : prob < 0.5;
    if (!keep_going) return eps;
    eps *= direction > 0.0 ? 2.0 : 0.5;
  }
  throw Error::numeric(
      "find_reasonable_epsilon: no crossing after 100 doublings");
}

void NutsConfig::validate() const {
  if (!(target_accept > 0.0 && target_accept < 1.0)) {
    throw Error::usage("nuts config: target acceptance must be in (0, 1)");
  }
  if (max_tree_depth < 1 || max_tree_depth > 12) {
    throw Error::usage("nuts config: max tree depth must be in 1..12");
  }
  if (samples == 0) throw Error::usage("nuts config: samples must be > 0");
  if (!(divergence_threshold > 0.0)) {
    throw Error::usage("nuts config: divergence threshold must be > 0");
  }
}

namespace {

bool no_uturn(const LeapfrogState& backward, const LeapfrogState& forward) {
  std::vector<double> span(forward.position.size());
  for (std::size_t i = 0; i < span.size(); ++i) {
    span[i] = forward.position[i] - backward.position[i];
  }
  return dot(span, backward.momentum) >= 0.0 &&
         dot(span, forward.momentum) >= 0.0;
}

}  // namespace

Tree build_tree(const LogDensityFn& fn, const LeapfrogState& start,
                int direction, int depth, double eps, double h0,
                const NutsConfig& config, SeededRng& rng) {
  if (depth == 0) {
    const LeapfrogState node =
        leapfrog(fn, start, static_cast<double>(direction) * eps);
    const double h = hamiltonian(node);
    const double energy_error = h - h0;
    Tree leaf;
    leaf.divergent =
        !std::isfinite(h) || energy_error > config.divergence_threshold;
    leaf.valid = !leaf.divergent;
    leaf.log_sum_weight = leaf.divergent
                              ? -std::numeric_limits<double>::infinity()
                              : -energy_error;
    leaf.sum_accept = std::isfinite(energy_error)
                          ? std::min(1.0, std::exp(-energy_error))
                          : 0.0;
    leaf.n_accept = 1;
    leaf.proposal = node.position;
    leaf.backward = node;
    leaf.forward = node;
    return leaf;
  }

  Tree inner = build_tree(fn, start, direction, depth - 1, eps, h0, config, rng);
  if (!inner.valid) return inner;

  const LeapfrogState& edge = direction > 0 ? inner.forward : inner.backward;
  Tree outer = build_tree(fn, edge, direction, depth - 1, eps, h0, config, rng);

  Tree combined = inner;
  combined.sum_accept += outer.sum_accept;
  combined.n_accept += outer.n_accept;
  combined.divergent = inner.divergent || outer.divergent;
  if (!outer.valid) {
    combined.valid = false;
    return combined;
  }
  combined.log_sum_weight =
      log_add_exp(inner.log_sum_weight, outer.log_sum_weight);
  // Multinomial draw between the two halves, weighted by total mass.
  if (std::log(rng.uniform()) <
      outer.log_sum_weight - combined.log_sum_weight) {
    combined.proposal = outer.proposal;
  }
  if (direction > 0) {
    combined.forward = outer.forward;
  } else {
    combined.backward = outer.backward;
  }
  combined.valid = no_uturn(combined.backward, combined.forward);
  return combined;
}

namespace {

struct DrawResult {
  std::vector<double> position;
  DrawDiagnostics diagnostics;
};

DrawResult nuts_draw(const LogDensityFn& fn, const LeapfrogState& current,
                     double eps, const NutsConfig& config, SeededRng& rng) {
  LeapfrogState state = current;
  state.momentum.resize(state.position.size());
  for (double& r : state.momentum) r = rng.normal();
  const double h0 = hamiltonian(state);

  LeapfrogState backward = state;
  LeapfrogState forward = state;
  std::vector<double> proposal = state.position;
  double log_sum_weight = 0.0;  // the initial point carries weight exp(0)
  double sum_accept = 0.0;
  std::size_t n_accept = 0;
  bool divergent = false;
  int depth = 0;

  while (depth < config.max_tree_depth) {
    const int direction = rng.uniform() < 0.5 ? -1 : 1;
    const Tree subtree =
        build_tree(fn, direction > 0 ? forward : backward, direction, depth,
                   eps, h0, config, rng);
    sum_accept += subtree.sum_accept;
    n_accept += subtree.n_accept;
    divergent = divergent || subtree.divergent;
    if (!subtree.valid) break;

    // Biased progressive sampling favors the fresh half of the trajectory.
    if (std::log(rng.uniform()) <
        subtree.log_sum_weight - log_sum_weight) {
      proposal = subtree.proposal;
    }
    log_sum_weight = log_add_exp(log_sum_weight, subtree.log_sum_weight);
    if (direction > 0) {
      forward = subtree.forward;
    } else {
      backward = subtree.backward;
    }
    ++depth;
    if (!no_uturn(backward, forward)) break;
  }

  DrawResult result;
  result.position = std::move(proposal);
  result.diagnostics.tree_depth = depth;
  result.diagnostics.divergent = divergent;
  result.diagnostics.step_size = eps;
  result.diagnostics.accept_stat =
      n_accept > 0 ? sum_accept / static_cast<double>(n_accept) : 0.0;
  return result;
}

}  // namespace

NutsResult nuts_sample(const LogDensityFn& fn, std::vector<double> theta0,
                       const NutsConfig& config) {
  config.validate();
  if (theta0.empty()) throw Error::usage("nuts_sample: empty start point");
  SeededRng rng(config.seed);

  LeapfrogState current = make_leapfrog_state(
      fn, std::move(theta0), std::vector<double>(0));
  current.momentum.assign(current.position.size(), 0.0);
  if (!std::isfinite(current.logp)) {
    throw Error::data("nuts_sample: non-finite density at start point");
  }

  double eps = find_reasonable_epsilon(fn, current, rng);

  // Dual averaging toward the target acceptance statistic.
  const double mu_da = std::log(10.0 * eps);
  double log_eps_bar = 0.0;
  double h_bar = 0.0;
  for (std::size_t m = 1; m <= config.warmup; ++m) {
    DrawResult draw = nuts_draw(fn, current, eps, config, rng);
    current = make_leapfrog_state(fn, std::move(draw.position),
                                  std::vector<double>(current.position.size(), 0.0));
    const double md = static_cast<double>(m);
    const double shrink = 1.0 / (md + config.da_t0);
    h_bar = (1.0 - shrink) * h_bar +
            shrink * (config.target_accept - draw.diagnostics.accept_stat);
    const double log_eps = mu_da - std::sqrt(md) / config.da_gamma * h_bar;
    const double eta = std::pow(md, -config.da_kappa);
    log_eps_bar = eta * log_eps + (1.0 - eta) * log_eps_bar;
    eps = std::exp(log_eps);
  }
  if (config.warmup > 0) eps = std::exp(log_eps_bar);

  NutsResult result;
  result.adapted_step_size = eps;
  result.draws.reserve(config.samples);
  result.diagnostics.reserve(config.samples);
  std::size_t divergent_count = 0;
  for (std::size_t m = 0; m < config.samples; ++m) {
    DrawResult draw = nuts_draw(fn, current, eps, config, rng);
    current = make_leapfrog_state(fn, draw.position,
                                  std::vector<double>(current.position.size(), 0.0));
    if (draw.diagnostics.divergent) ++divergent_count;
    result.draws.push_back(std::move(draw.position));
    result.diagnostics.push_back(draw.diagnostics);
  }

  const double divergence_rate = static_cast<double>(divergent_count) /
                                 static_cast<double>(config.samples);
  if (divergence_rate > 0.10) {
    throw Error::numeric("nuts_sample: divergence rate " +
                         std::to_string(divergence_rate) +
                         " exceeds 10% of kept draws");
  }
  return result;
}

PosteriorSamples nuts_sample(const MixtureModel& model,
                             std::span<const double> data,
                             const NutsConfig& config) {
  if (data.empty()) throw Error::data("nuts_sample: empty data");
  const LogDensityFn fn =
      model.posterior(std::vector<double>(data.begin(), data.end()));
  NutsResult raw = nuts_sample(fn, model.initial_theta(data), config);

  PosteriorSamples samples;
  samples.components = model.components;
  samples.adapted_step_size = raw.adapted_step_size;
  samples.diagnostics = std::move(raw.diagnostics);
  samples.draws.reserve(raw.draws.size());
  for (const auto& theta : raw.draws) {
    const MixtureModel::Constrained c = model.constrain(theta);
    std::vector<double> row;
    row.reserve(model.dim());
    row.insert(row.end(), c.mean.begin(), c.mean.end());
    row.insert(row.end(), c.sigma.begin(), c.sigma.end());
    row.insert(row.end(), c.weight.begin(), c.weight.end());
    samples.draws.push_back(std::move(row));
  }
  return samples;
}

std::vector<double> posterior_predictive(const PosteriorSamples& samples,
                                         std::size_t n, std::uint64_t seed) {
  if (samples.draws.empty()) {
    throw Error::data("posterior_predictive: no posterior draws");
  }
  const auto k = static_cast<std::size_t>(samples.components);
  SeededRng rng(seed);
  std::vector<double> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& row = samples.draws[rng.uniform_index(samples.draws.size())];
    const double u = rng.uniform();
    double cumulative = 0.0;
    std::size_t component = k - 1;
    for (std::size_t j = 0; j < k; ++j) {
      cumulative += row[2 * k + j];
      if (u < cumulative) {
        component = j;
        break;
      }
    }
    out.push_back(row[component] + row[k + component] * rng.normal());
  }
  return out;
}

}  // namespace idprice
