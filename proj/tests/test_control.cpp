#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ampo/control.hpp"
#include "ampo/errors.hpp"
#include "ampo/omega_potential.hpp"

using namespace ampo;

namespace {

ControlConfig smoke_config(const std::string& env) {
  ControlConfig cfg;
  cfg.env = env;
  cfg.iterations = 3;
  cfg.rollout_steps = 256;
  cfg.actor_width = 32;
  cfg.critic_width = 16;
  cfg.epochs = 2;
  cfg.minibatch = 64;
  return cfg;
}

}  // namespace

TEST_CASE("cart training produces one curve point per iteration") {
  const ControlConfig cfg = smoke_config("cartpole");
  const ControlCurve curve = train_control(cfg, 3);
  REQUIRE(curve.mean_return.size() == 3);
  REQUIRE(curve.episodes.size() == 3);
  REQUIRE(curve.wall_ms.size() == 3);
  CHECK(curve.seed == 3);
  for (int t = 0; t < 3; ++t) {
    CHECK(std::isfinite(curve.mean_return[t]));
    CHECK(curve.episodes[t] >= 1);  // 256 steps always finish an episode early on
    CHECK(curve.mean_return[t] >= 1.0);
    CHECK(curve.mean_return[t] <= 500.0);
    CHECK(curve.wall_ms[t] >= 0.0);
  }
}

TEST_CASE("cart training replays bitwise under a fixed seed") {
  const ControlConfig cfg = smoke_config("cartpole");
  const ControlCurve a = train_control(cfg, 11);
  const ControlCurve b = train_control(cfg, 11);
  REQUIRE(a.mean_return.size() == b.mean_return.size());
  for (std::size_t t = 0; t < a.mean_return.size(); ++t) {
    CHECK(a.mean_return[t] == b.mean_return[t]);
    CHECK(a.episodes[t] == b.episodes[t]);
  }
  const ControlCurve c = train_control(cfg, 12);
  bool differs = false;
  for (std::size_t t = 0; t < a.mean_return.size(); ++t)
    differs = differs || a.mean_return[t] != c.mean_return[t];
  CHECK(differs);
}

TEST_CASE("acrobot training yields bounded negative returns") {
  ControlConfig cfg = smoke_config("acrobot");
  cfg.iterations = 2;
  const ControlCurve curve = train_control(cfg, 5);
  REQUIRE(curve.mean_return.size() == 2);
  for (double r : curve.mean_return) {
    CHECK(r <= 0.0);
    CHECK(r >= -500.0);
  }
}

TEST_CASE("the single-sample inner fit and the l2 map also train") {
  ControlConfig cfg = smoke_config("cartpole");
  cfg.inner = "sgd";
  cfg.sgd_steps = 512;
  const ControlCurve sgd_curve = train_control(cfg, 2);
  CHECK(sgd_curve.mean_return.size() == 3);
  CHECK(std::isfinite(sgd_curve.mean_return.back()));

  ControlConfig l2 = smoke_config("cartpole");
  l2.map = OmegaPotential::squared_l2();
  const ControlCurve l2_curve = train_control(l2, 2);
  CHECK(l2_curve.mean_return.size() == 3);
  CHECK(std::isfinite(l2_curve.mean_return.back()));
}

TEST_CASE("invalid control configurations are rejected") {
  ControlConfig cfg = smoke_config("cartpole");
  cfg.env = "mountaincar";
  CHECK_THROWS_AS(train_control(cfg, 1), InputError);
  cfg = smoke_config("cartpole");
  cfg.inner = "newton";
  CHECK_THROWS_AS(train_control(cfg, 1), InputError);
  cfg = smoke_config("cartpole");
  cfg.iterations = 0;
  CHECK_THROWS_AS(train_control(cfg, 1), InputError);
  cfg = smoke_config("cartpole");
  cfg.rollout_steps = 0;
  CHECK_THROWS_AS(train_control(cfg, 1), InputError);
}
