#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ampo/omega_potential.hpp"

namespace ampo {

// Mirror-descent policy training on a control environment. The actor is a
// shallow ReLU net over (observation, action) encodings; the policy at a
// state is the Bregman projection of eta times its scores. Q targets come
// from lambda-weighted advantages plus the critic value; the inner fit
// regresses scores onto target-plus-clip-floor per the mirror-descent
// recursion, either with minibatched Adam on the trainable inner weights
// (default) or with the plain single-sample SGD rule.
struct ControlConfig {
  std::string env = "cartpole";  // "cartpole" or "acrobot"
  OmegaPotential map = OmegaPotential::negative_entropy();
  double eta = 1.0;
  int iterations = 150;
  int rollout_steps = 2048;
  double gamma = 0.99;
  double gae_lambda = 0.95;
  double projection_precision = 1e-8;

  int actor_width = 128;
  double actor_eps_a = 1.0;
  std::string inner = "adam";  // "adam" or "sgd"
  int epochs = 10;
  int minibatch = 256;
  double adam_lr = 2e-2;
  int sgd_steps = 8192;        // inner = "sgd"
  double sgd_alpha = 1e-2;

  int critic_width = 64;
  double critic_lr = 1e-2;
};

struct ControlCurve {
  std::vector<double> mean_return;  // per outer iteration, episodes finished in it
  std::vector<int> episodes;        // completed episodes per iteration
  std::vector<double> wall_ms;
  std::uint64_t seed = 0;
};

ControlCurve train_control(const ControlConfig& cfg, std::uint64_t seed);

}  // namespace ampo
