#include "ampo/envs.hpp"

#include <algorithm>
#include <cmath>

#include "ampo/errors.hpp"

namespace ampo {
namespace {

constexpr int kStepCap = 500;
constexpr double kPi = 3.14159265358979323846;

// Cart-pole constants.
constexpr double kGravity = 9.8;
constexpr double kMassCart = 1.0;
constexpr double kMassPole = 0.1;
constexpr double kTotalMass = kMassCart + kMassPole;
constexpr double kPoleHalfLength = 0.5;
constexpr double kPoleMassLength = kMassPole * kPoleHalfLength;
constexpr double kForceMag = 10.0;
constexpr double kCartTau = 0.02;
constexpr double kThetaLimit = 12.0 * 2.0 * kPi / 360.0;
constexpr double kXLimit = 2.4;

// Acrobot constants: unit masses, lengths and inertias, centers mid-link.
constexpr double kL1 = 1.0;
constexpr double kM1 = 1.0, kM2 = 1.0;
constexpr double kLc1 = 0.5, kLc2 = 0.5;
constexpr double kI1 = 1.0, kI2 = 1.0;
constexpr double kAcroG = 9.8;
constexpr double kAcroTau = 0.2;
constexpr double kMaxVel1 = 4.0 * kPi;
constexpr double kMaxVel2 = 9.0 * kPi;

double wrap_pi(double x) {
  while (x > kPi) x -= 2.0 * kPi;
  while (x < -kPi) x += 2.0 * kPi;
  return x;
}

Eigen::Vector4d acrobot_derivatives(const Eigen::Vector4d& s, double torque) {
  const double t1 = s[0], t2 = s[1], w1 = s[2], w2 = s[3];
  const double d1 =
      kM1 * kLc1 * kLc1 + kM2 * (kL1 * kL1 + kLc2 * kLc2 + 2.0 * kL1 * kLc2 * std::cos(t2)) +
      kI1 + kI2;
  const double d2 = kM2 * (kLc2 * kLc2 + kL1 * kLc2 * std::cos(t2)) + kI2;
  const double phi2 = kM2 * kLc2 * kAcroG * std::cos(t1 + t2 - kPi / 2.0);
  const double phi1 = -kM2 * kL1 * kLc2 * w2 * w2 * std::sin(t2) -
                      2.0 * kM2 * kL1 * kLc2 * w2 * w1 * std::sin(t2) +
                      (kM1 * kLc1 + kM2 * kL1) * kAcroG * std::cos(t1 - kPi / 2.0) + phi2;
  const double a2 =
      (torque + d2 / d1 * phi1 - kM2 * kL1 * kLc2 * w1 * w1 * std::sin(t2) - phi2) /
      (kM2 * kLc2 * kLc2 + kI2 - d2 * d2 / d1);
  const double a1 = -(d2 * a2 + phi1) / d1;
  return {w1, w2, a1, a2};
}

}  // namespace

Eigen::VectorXd CartPoleEnv::reset(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(-0.05, 0.05);
  for (int i = 0; i < 4; ++i) s_[i] = unif(rng);
  t_ = 0;
  live_ = true;
  return s_;
}

EnvStep CartPoleEnv::step(int action) {
  if (!live_) throw InputError("CartPoleEnv::step after episode end");
  if (action < 0 || action >= kActions) throw InputError("CartPoleEnv::step bad action");
  const double force = action == 1 ? kForceMag : -kForceMag;
  const double cos_t = std::cos(s_[2]), sin_t = std::sin(s_[2]);
  const double temp = (force + kPoleMassLength * s_[3] * s_[3] * sin_t) / kTotalMass;
  const double theta_acc =
      (kGravity * sin_t - cos_t * temp) /
      (kPoleHalfLength * (4.0 / 3.0 - kMassPole * cos_t * cos_t / kTotalMass));
  const double x_acc = temp - kPoleMassLength * theta_acc * cos_t / kTotalMass;

  // Semi-explicit Euler: positions advance on the pre-step velocities.
  s_[0] += kCartTau * s_[1];
  s_[1] += kCartTau * x_acc;
  s_[2] += kCartTau * s_[3];
  s_[3] += kCartTau * theta_acc;
  ++t_;

  EnvStep out;
  out.observation = s_;
  out.reward = 1.0;
  out.terminated = s_[0] < -kXLimit || s_[0] > kXLimit || s_[2] < -kThetaLimit ||
                   s_[2] > kThetaLimit;
  out.truncated = !out.terminated && t_ >= kStepCap;
  if (out.done()) live_ = false;
  return out;
}

Eigen::Vector4d AcrobotEnv::rk4_step(const Eigen::Vector4d& s, double torque) {
  const double h = kAcroTau;
  const Eigen::Vector4d k1 = acrobot_derivatives(s, torque);
  const Eigen::Vector4d k2 = acrobot_derivatives(s + 0.5 * h * k1, torque);
  const Eigen::Vector4d k3 = acrobot_derivatives(s + 0.5 * h * k2, torque);
  const Eigen::Vector4d k4 = acrobot_derivatives(s + h * k3, torque);
  return s + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

Eigen::VectorXd AcrobotEnv::reset(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(-0.1, 0.1);
  for (int i = 0; i < 4; ++i) s_[i] = unif(rng);
  t_ = 0;
  live_ = true;
  return observation();
}

Eigen::VectorXd AcrobotEnv::observation() const {
  Eigen::VectorXd obs(kObsDim);
  obs << std::cos(s_[0]), std::sin(s_[0]), std::cos(s_[1]), std::sin(s_[1]), s_[2], s_[3];
  return obs;
}

EnvStep AcrobotEnv::step(int action) {
  if (!live_) throw InputError("AcrobotEnv::step after episode end");
  if (action < 0 || action >= kActions) throw InputError("AcrobotEnv::step bad action");
  const double torque = static_cast<double>(action - 1);
  s_ = rk4_step(s_, torque);
  s_[0] = wrap_pi(s_[0]);
  s_[1] = wrap_pi(s_[1]);
  s_[2] = std::clamp(s_[2], -kMaxVel1, kMaxVel1);
  s_[3] = std::clamp(s_[3], -kMaxVel2, kMaxVel2);
  ++t_;

  EnvStep out;
  out.observation = observation();
  out.terminated = -std::cos(s_[0]) - std::cos(s_[1] + s_[0]) > 1.0;
  out.reward = out.terminated ? 0.0 : -1.0;
  out.truncated = !out.terminated && t_ >= kStepCap;
  if (out.done()) live_ = false;
  return out;
}

double acrobot_energy(const Eigen::Vector4d& s) {
  const double t1 = s[0], t2 = s[1], w1 = s[2], w2 = s[3];
  const double d1 =
      kM1 * kLc1 * kLc1 + kM2 * (kL1 * kL1 + kLc2 * kLc2 + 2.0 * kL1 * kLc2 * std::cos(t2)) +
      kI1 + kI2;
  const double d2 = kM2 * (kLc2 * kLc2 + kL1 * kLc2 * std::cos(t2)) + kI2;
  const double m22 = kM2 * kLc2 * kLc2 + kI2;
  const double kinetic = 0.5 * d1 * w1 * w1 + d2 * w1 * w2 + 0.5 * m22 * w2 * w2;
  const double potential = -kAcroG * ((kM1 * kLc1 + kM2 * kL1) * std::cos(t1) +
                                      kM2 * kLc2 * std::cos(t1 + t2));
  return kinetic + potential;
}

}  // namespace ampo
