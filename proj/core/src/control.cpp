#include "ampo/control.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <numeric>
#include <random>

#include "ampo/engine.hpp"
#include "ampo/envs.hpp"
#include "ampo/errors.hpp"
#include "ampo/function_approx.hpp"
#include "ampo/projection.hpp"

namespace ampo {
namespace {

// First-moment/second-moment adaptive update for one parameter block.
struct AdamBuf {
  Eigen::MatrixXd m, v;
  int t = 0;

  void init(Eigen::Index rows, Eigen::Index cols) {
    m = Eigen::MatrixXd::Zero(rows, cols);
    v = Eigen::MatrixXd::Zero(rows, cols);
    t = 0;
  }
  void update(Eigen::Ref<Eigen::MatrixXd> param, const Eigen::MatrixXd& grad, double lr) {
    ++t;
    m = 0.9 * m + 0.1 * grad;
    v = 0.999 * v + 0.001 * grad.cwiseProduct(grad);
    const double mc = 1.0 - std::pow(0.9, t), vc = 1.0 - std::pow(0.999, t);
    param.array() -= lr * (m.array() / mc) / ((v.array() / vc).sqrt() + 1e-8);
  }
};

// Value head: one hidden ReLU layer, every parameter trained.
struct Critic {
  Eigen::MatrixXd w1;
  Eigen::VectorXd b1, w2;
  double b2 = 0.0;
  AdamBuf a_w1, a_b1, a_w2, a_b2;

  Critic(int width, int obs_dim, std::mt19937_64& rng) {
    std::normal_distribution<double> n1(0.0, std::sqrt(2.0 / obs_dim));
    std::normal_distribution<double> n2(0.0, std::sqrt(1.0 / width));
    w1.resize(width, obs_dim);
    for (Eigen::Index i = 0; i < w1.size(); ++i) w1.data()[i] = n1(rng);
    b1 = Eigen::VectorXd::Zero(width);
    w2.resize(width);
    for (int i = 0; i < width; ++i) w2[i] = n2(rng);
    a_w1.init(w1.rows(), w1.cols());
    a_b1.init(b1.size(), 1);
    a_w2.init(w2.size(), 1);
    a_b2.init(1, 1);
  }

  double value(const Eigen::VectorXd& obs) const {
    return w2.dot(((w1 * obs + b1).cwiseMax(0.0))) + b2;
  }

  void fit_batch(const std::vector<Eigen::VectorXd>& obs, const std::vector<double>& target,
                 const std::vector<int>& idx, double lr) {
    Eigen::MatrixXd g_w1 = Eigen::MatrixXd::Zero(w1.rows(), w1.cols());
    Eigen::VectorXd g_b1 = Eigen::VectorXd::Zero(b1.size());
    Eigen::VectorXd g_w2 = Eigen::VectorXd::Zero(w2.size());
    double g_b2 = 0.0;
    for (int i : idx) {
      const Eigen::VectorXd pre = w1 * obs[static_cast<std::size_t>(i)] + b1;
      const Eigen::VectorXd h = pre.cwiseMax(0.0);
      const double err = w2.dot(h) + b2 - target[static_cast<std::size_t>(i)];
      const Eigen::VectorXd gate =
          (pre.array() > 0.0).select(w2, Eigen::VectorXd::Zero(w2.size()));
      g_w1.noalias() += err * gate * obs[static_cast<std::size_t>(i)].transpose();
      g_b1.noalias() += err * gate;
      g_w2.noalias() += err * h;
      g_b2 += err;
    }
    const double inv = 1.0 / static_cast<double>(idx.size());
    a_w1.update(w1, g_w1 * inv, lr);
    Eigen::Map<Eigen::MatrixXd> b1m(b1.data(), b1.size(), 1);
    a_b1.update(b1m, g_b1 * inv, lr);
    Eigen::Map<Eigen::MatrixXd> w2m(w2.data(), w2.size(), 1);
    a_w2.update(w2m, g_w2 * inv, lr);
    Eigen::MatrixXd b2m(1, 1), g_b2m(1, 1);
    b2m(0, 0) = b2;
    g_b2m(0, 0) = g_b2 * inv;
    a_b2.update(b2m, g_b2m, lr);
    b2 = b2m(0, 0);
  }
};

struct EnvBox {
  int n_actions = 0, obs_dim = 0;
  std::function<Eigen::VectorXd(std::mt19937_64&)> reset;
  std::function<EnvStep(int)> step;
};

EnvBox make_env(const std::string& name) {
  EnvBox box;
  if (name == "cartpole") {
    auto env = std::make_shared<CartPoleEnv>();
    box.n_actions = CartPoleEnv::kActions;
    box.obs_dim = CartPoleEnv::kObsDim;
    box.reset = [env](std::mt19937_64& rng) { return env->reset(rng); };
    box.step = [env](int a) { return env->step(a); };
  } else if (name == "acrobot") {
    auto env = std::make_shared<AcrobotEnv>();
    box.n_actions = AcrobotEnv::kActions;
    box.obs_dim = AcrobotEnv::kObsDim;
    box.reset = [env](std::mt19937_64& rng) { return env->reset(rng); };
    box.step = [env](int a) { return env->step(a); };
  } else {
    throw InputError("unknown environment: " + name);
  }
  return box;
}

struct Transition {
  Eigen::VectorXd x;         // encoded (obs, action) net input
  Eigen::VectorXd obs;       // raw observation for the critic
  Eigen::VectorXd obs_next;  // successor, for truncation bootstraps
  double f_sa = 0.0;         // actor score of the taken action
  double lambda = 0.0;       // projection normalizer at the state
  double v_hat = 0.0;
  double reward = 0.0;
  bool terminated = false;
  bool truncated = false;    // episode cap or batch cut
};

}  // namespace

ControlCurve train_control(const ControlConfig& cfg, std::uint64_t seed) {
  if (cfg.iterations < 1 || cfg.rollout_steps < 2) throw InputError("train_control: bad sizes");
  if (cfg.inner != "adam" && cfg.inner != "sgd")
    throw InputError("train_control: inner must be adam or sgd");
  EnvBox env = make_env(cfg.env);
  std::mt19937_64 rng(seed);

  const int enc_dim = env.obs_dim + env.n_actions + 1;
  ShallowReluNet actor = make_shallow_relu(cfg.actor_width, enc_dim, cfg.actor_eps_a, seed ^ 0x9e3779b97f4a7c15ULL);
  AdamBuf actor_adam;
  actor_adam.init(actor.w.rows(), actor.w.cols());
  Critic critic(cfg.critic_width, env.obs_dim, rng);

  const ExtendedReal floor = cfg.map.inverse(0.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  ControlCurve curve;
  curve.seed = seed;

  Eigen::VectorXd obs = env.reset(rng);
  double ep_return = 0.0;
  double last_mean = 0.0;

  std::vector<Transition> batch(static_cast<std::size_t>(cfg.rollout_steps));
  Eigen::VectorXd scores(env.n_actions);

  for (int iter = 0; iter < cfg.iterations; ++iter) {
    const auto t0 = std::chrono::steady_clock::now();
    double sum_return = 0.0;
    int n_episodes = 0;

    for (int i = 0; i < cfg.rollout_steps; ++i) {
      Transition& tr = batch[static_cast<std::size_t>(i)];
      for (int a = 0; a < env.n_actions; ++a)
        scores[a] = net_value(actor, encode_state_action(obs, a, env.n_actions));
      const ProjectionResult pr = project(cfg.eta * scores, cfg.map, cfg.projection_precision);

      const double u = unif(rng);
      int action = env.n_actions - 1;
      double acc = 0.0;
      for (int a = 0; a < env.n_actions; ++a) {
        acc += pr.dist[a];
        if (u < acc) { action = a; break; }
      }

      tr.obs = obs;
      tr.x = encode_state_action(obs, action, env.n_actions);
      tr.f_sa = scores[action];
      tr.lambda = pr.lambda;
      tr.v_hat = critic.value(obs);

      const EnvStep st = env.step(action);
      tr.reward = st.reward;
      tr.terminated = st.terminated;
      tr.truncated = st.truncated;
      tr.obs_next = st.observation;
      ep_return += st.reward;

      if (st.done()) {
        sum_return += ep_return;
        ++n_episodes;
        ep_return = 0.0;
        obs = env.reset(rng);
      } else {
        obs = st.observation;
      }
    }
    batch.back().truncated = batch.back().truncated || !batch.back().terminated;

    // Per-episode-segment advantage passes; truncated segments bootstrap on
    // the critic's value of the successor state.
    const int n = cfg.rollout_steps;
    std::vector<double> q_hat(static_cast<std::size_t>(n)), v_target(static_cast<std::size_t>(n));
    int start = 0;
    while (start < n) {
      int end = start;
      while (end < n - 1 && !batch[static_cast<std::size_t>(end)].terminated &&
             !batch[static_cast<std::size_t>(end)].truncated)
        ++end;
      std::vector<double> rew, val;
      for (int i = start; i <= end; ++i) {
        rew.push_back(batch[static_cast<std::size_t>(i)].reward);
        val.push_back(batch[static_cast<std::size_t>(i)].v_hat);
      }
      const Transition& tail = batch[static_cast<std::size_t>(end)];
      const double boot = tail.terminated ? 0.0 : critic.value(tail.obs_next);
      const std::vector<double> adv = gae_advantages(rew, val, boot, cfg.gamma, cfg.gae_lambda);
      for (int i = start; i <= end; ++i) {
        q_hat[static_cast<std::size_t>(i)] = adv[static_cast<std::size_t>(i - start)];
        v_target[static_cast<std::size_t>(i)] =
            adv[static_cast<std::size_t>(i - start)] + val[static_cast<std::size_t>(i - start)];
      }
      start = end + 1;
    }

    // Mirror-descent regression targets on the visited pairs. The advantage
    // stands in for Q up to a per-state constant, which the projection
    // normalizer absorbs.
    std::vector<double> y(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      const Transition& tr = batch[static_cast<std::size_t>(i)];
      const double clip = floor.is_finite()
                              ? floor.value() - tr.lambda
                              : -std::numeric_limits<double>::infinity();
      y[static_cast<std::size_t>(i)] =
          q_hat[static_cast<std::size_t>(i)] + std::max(cfg.eta * tr.f_sa, clip) / cfg.eta;
    }

    if (cfg.inner == "adam") {
      std::vector<int> order(static_cast<std::size_t>(n));
      std::iota(order.begin(), order.end(), 0);
      for (int e = 0; e < cfg.epochs; ++e) {
        std::shuffle(order.begin(), order.end(), rng);
        for (int lo = 0; lo + cfg.minibatch <= n; lo += cfg.minibatch) {
          Eigen::MatrixXd g = Eigen::MatrixXd::Zero(actor.w.rows(), actor.w.cols());
          for (int j = lo; j < lo + cfg.minibatch; ++j) {
            const Transition& tr = batch[static_cast<std::size_t>(order[static_cast<std::size_t>(j)])];
            const double err =
                net_value(actor, tr.x) - y[static_cast<std::size_t>(order[static_cast<std::size_t>(j)])];
            g.noalias() += err * net_grad_w(actor, tr.x);
          }
          actor_adam.update(actor.w, g / cfg.minibatch, cfg.adam_lr);
        }
      }
    } else {
      std::uniform_int_distribution<int> pick(0, n - 1);
      const std::uint64_t sgd_seed = rng();
      fit_sgd(
          actor, cfg.sgd_steps, cfg.sgd_alpha,
          [&](std::mt19937_64& r) {
            const int i = pick(r);
            return std::make_pair(batch[static_cast<std::size_t>(i)].x,
                                  y[static_cast<std::size_t>(i)]);
          },
          sgd_seed);
    }

    {  // critic regression on the lambda-returns
      std::vector<Eigen::VectorXd> obs_list(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i) obs_list[static_cast<std::size_t>(i)] = batch[static_cast<std::size_t>(i)].obs;
      std::vector<int> order(static_cast<std::size_t>(n));
      std::iota(order.begin(), order.end(), 0);
      for (int e = 0; e < cfg.epochs; ++e) {
        std::shuffle(order.begin(), order.end(), rng);
        for (int lo = 0; lo + cfg.minibatch <= n; lo += cfg.minibatch) {
          std::vector<int> idx(order.begin() + lo, order.begin() + lo + cfg.minibatch);
          critic.fit_batch(obs_list, v_target, idx, cfg.critic_lr);
        }
      }
    }

    last_mean = n_episodes > 0 ? sum_return / n_episodes : last_mean;
    curve.mean_return.push_back(last_mean);
    curve.episodes.push_back(n_episodes);
    curve.wall_ms.push_back(
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count());
  }
  return curve;
}

}  // namespace ampo
