#pragma once

#include <Eigen/Core>
#include <random>

namespace ampo {

struct EnvStep {
  Eigen::VectorXd observation;
  double reward = 0.0;
  bool terminated = false;  // reached a terminal configuration
  bool truncated = false;   // hit the 500-step cap
  bool done() const { return terminated || truncated; }
};

// Cart-pole balancing, explicit Euler at tau = 0.02. Two actions push the
// cart left or right with 10 N; +1 reward per step; episode ends when
// |x| > 2.4, |theta| > 12 degrees, or after 500 steps.
class CartPoleEnv {
 public:
  static constexpr int kActions = 2;
  static constexpr int kObsDim = 4;

  Eigen::VectorXd reset(std::mt19937_64& rng);
  EnvStep step(int action);

  const Eigen::Vector4d& state() const { return s_; }
  Eigen::VectorXd observation() const { return s_; }
  int steps() const { return t_; }

 private:
  Eigen::Vector4d s_ = Eigen::Vector4d::Zero();  // x, x_dot, theta, theta_dot
  int t_ = 0;
  bool live_ = false;
};

// Two-link underactuated pendulum, RK4 at tau = 0.2. Three torque actions
// {-1, 0, +1} on the second joint; -1 reward per non-terminal step; episode
// ends when the tip height -cos(t1) - cos(t1 + t2) exceeds 1, or after 500
// steps. Observation is (cos t1, sin t1, cos t2, sin t2, w1, w2).
class AcrobotEnv {
 public:
  static constexpr int kActions = 3;
  static constexpr int kObsDim = 6;

  Eigen::VectorXd reset(std::mt19937_64& rng);
  EnvStep step(int action);

  const Eigen::Vector4d& state() const { return s_; }  // t1, t2, w1, w2
  Eigen::VectorXd observation() const;
  int steps() const { return t_; }

  // One RK4 step of the raw dynamics, before angle wrapping and velocity
  // clamping; exposed for conservation tests.
  static Eigen::Vector4d rk4_step(const Eigen::Vector4d& s, double torque);

 private:
  Eigen::Vector4d s_ = Eigen::Vector4d::Zero();
  int t_ = 0;
  bool live_ = false;
};

// Total mechanical energy of the acrobot state, conserved by the ideal
// zero-torque dynamics.
double acrobot_energy(const Eigen::Vector4d& s);

}  // namespace ampo
