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
#include <functional>
#include <span>
#include <vector>

#include "numerics.hpp"

namespace idprice {

// Log target density with gradient: returns log pi(theta) and, when `grad` is
// non-null, fills d log pi / d theta.
using LogDensityFn =
    std::function<double(std::span<const double>, std::vector<double>*)>;

// Gaussian mixture over pooled prices, parameterized on unconstrained space:
// theta = (means, log sigmas, weight logits), dim = 3K. Priors follow the
// data scale: mu_k ~ Normal(data mean, 2 * data std), sigma_k ~ HalfNormal
// (data std), logits ~ Normal(0, 1). Weights are softmax(logits); the log
// sigma change of variables carries its Jacobian term.
struct MixtureModel {
  int components = 2;
  double prior_mean_loc = 0.0;
  double prior_mean_scale = 1.0;
  double prior_sigma_scale = 1.0;

  static MixtureModel for_data(int components, std::span<const double> data);

  std::size_t dim() const { return static_cast<std::size_t>(3 * components); }

  struct Constrained {
    std::vector<double> mean;
    std::vector<double> sigma;
    std::vector<double> weight;
  };
  Constrained constrain(std::span<const double> theta) const;

  // Deterministic start: component means at the data quantiles, sigma at the
  // data std, flat weights.
  std::vector<double> initial_theta(std::span<const double> data) const;

  LogDensityFn posterior(std::vector<double> data) const;
};

// Log posterior (priors + mixture likelihood with log-sum-exp stabilization
// + change-of-variable terms) and its exact analytic gradient.
double log_posterior(const MixtureModel& model, std::span<const double> theta,
                     std::span<const double> data, std::vector<double>* grad);

struct LeapfrogState {
  std::vector<double> position;
  std::vector<double> momentum;
  std::vector<double> grad;  // of log density at `position`
  double logp = 0.0;
};

LeapfrogState make_leapfrog_state(const LogDensityFn& fn,
                                  std::vector<double> position,
                                  std::vector<double> momentum);

// One leapfrog step of size eps (possibly negative for backward time).
LeapfrogState leapfrog(const LogDensityFn& fn, const LeapfrogState& state,
                       double eps);

// -logp + |r|^2 / 2.
double hamiltonian(const LeapfrogState& state);

// Doubles/halves from eps = 1 until the one-step acceptance probability
// crosses 1/2.
double find_reasonable_epsilon(const LogDensityFn& fn,
                               const LeapfrogState& start, SeededRng& rng);

struct NutsConfig {
  std::size_t warmup = 1000;
  std::size_t samples = 5000;
  double target_accept = 0.8;  // dual-averaging target delta
  int max_tree_depth = 10;
  double da_gamma = 0.05;
  double da_t0 = 10.0;
  double da_kappa = 0.75;
  double divergence_threshold = 1000.0;  // on the Hamiltonian error
  std::uint64_t seed = 0;

  void validate() const;
};

struct DrawDiagnostics {
  int tree_depth = 0;
  bool divergent = false;
  double step_size = 0.0;
  double accept_stat = 0.0;
};

// Trajectory-doubling subtree summary with multinomial proposal weighting.
struct Tree {
  LeapfrogState backward;  // earliest node in trajectory time
  LeapfrogState forward;   // latest node in trajectory time
  std::vector<double> proposal;
  double log_sum_weight = 0.0;
  double sum_accept = 0.0;
  std::size_t n_accept = 0;
  bool valid = true;
  bool divergent = false;
};

// Recursively doubles the trajectory from `start` in `direction` (+1/-1),
// stopping subtrees on the U-turn criterion or on divergence (flags only,
// never a throw).
Tree build_tree(const LogDensityFn& fn, const LeapfrogState& start,
                int direction, int depth, double eps, double h0,
                const NutsConfig& config, SeededRng& rng);

struct NutsResult {
  std::vector<std::vector<double>> draws;  // kept draws x dim
  std::vector<DrawDiagnostics> diagnostics;
  double adapted_step_size = 0.0;
};

// Warmup with dual-averaging step-size adaptation, then fixed-step sampling.
// Fully deterministic given (seed, config, target). Fails when more than 10%
// of kept draws are divergent.
NutsResult nuts_sample(const LogDensityFn& fn, std::vector<double> theta0,
                       const NutsConfig& config);

struct PosteriorSamples {
  int components = 0;
  // Constrained rows: means, sigmas, weights (3K columns).
  std::vector<std::vector<double>> draws;
  std::vector<DrawDiagnostics> diagnostics;
  double adapted_step_size = 0.0;
};

PosteriorSamples nuts_sample(const MixtureModel& model,
                             std::span<const double> data,
                             const NutsConfig& config);

// For each draw: a posterior row chosen uniformly, a component by weight, a
// normal variate from that component. Values in EUR/MWh.
std::vector<double> posterior_predictive(const PosteriorSamples& samples,
                                         std::size_t n, std::uint64_t seed);

}  // namespace idprice
