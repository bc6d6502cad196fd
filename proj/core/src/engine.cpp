#include "ampo/engine.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include "ampo/errors.hpp"

namespace ampo {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

int sample_index(const double* probs, int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double u = unif(rng);
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    acc += probs[i];
    if (u < acc) return i;
  }
  return n - 1;  // guard against accumulated rounding
}

Eigen::MatrixXd regression_weights(const AmpoConfig& cfg, const TabularMdp& mdp,
                                   const PolicyTable& pi, const Eigen::VectorXd& d_pi) {
  switch (cfg.weight_mode) {
    case WeightMode::Uniform:
      return Eigen::MatrixXd::Constant(mdp.n_states, mdp.n_actions,
                                       1.0 / (mdp.n_states * mdp.n_actions));
    case WeightMode::OnPolicy: {
      Eigen::MatrixXd w(mdp.n_states, mdp.n_actions);
      for (int s = 0; s < mdp.n_states; ++s) w.row(s) = d_pi[s] * pi.row(s);
      return w;
    }
    case WeightMode::Custom:
      if (cfg.custom_weights.rows() != mdp.n_states || cfg.custom_weights.cols() != mdp.n_actions)
        throw InputError("custom regression weights have the wrong shape");
      return cfg.custom_weights;
  }
  throw InputError("unreachable weight mode");
}

}  // namespace

StepSizeSchedule StepSizeSchedule::constant(double eta0) {
  if (!(eta0 > 0.0) || !std::isfinite(eta0)) throw InputError("schedule needs eta0 > 0");
  StepSizeSchedule s;
  s.kind_ = Kind::Constant;
  s.eta0_ = eta0;
  return s;
}

StepSizeSchedule StepSizeSchedule::geometric(double eta0, double ratio) {
  if (!(eta0 > 0.0) || !std::isfinite(eta0)) throw InputError("schedule needs eta0 > 0");
  if (!(ratio >= 1.0) || !std::isfinite(ratio)) throw InputError("geometric schedule needs ratio >= 1");
  StepSizeSchedule s;
  s.kind_ = Kind::Geometric;
  s.eta0_ = eta0;
  s.ratio_ = ratio;
  return s;
}

StepSizeSchedule StepSizeSchedule::sequence(std::vector<double> etas) {
  if (etas.empty()) throw InputError("schedule sequence is empty");
  for (double e : etas)
    if (!(e > 0.0) || !std::isfinite(e)) throw InputError("schedule sequence needs positive entries");
  StepSizeSchedule s;
  s.kind_ = Kind::Sequence;
  s.etas_ = std::move(etas);
  return s;
}

double StepSizeSchedule::eta(int t) const {
  if (t < 0) throw InputError("schedule index must be nonnegative");
  switch (kind_) {
    case Kind::Constant: return eta0_;
    case Kind::Geometric: return eta0_ * std::pow(ratio_, t);
    case Kind::Sequence: return etas_[std::min<std::size_t>(t, etas_.size() - 1)];
  }
  throw InputError("unreachable schedule kind");
}

Eigen::MatrixXd regression_target_general(const Eigen::MatrixXd& q_est, const PolicyTable& pi,
                                          double eta, const OmegaPotential& map) {
  if (q_est.rows() != pi.rows() || q_est.cols() != pi.cols())
    throw InputError("regression_target_general: shape mismatch");
  if (!(eta > 0.0)) throw InputError("regression_target_general: eta must be positive");
  Eigen::MatrixXd target(q_est.rows(), q_est.cols());
  for (Eigen::Index s = 0; s < pi.rows(); ++s) {
    const std::vector<ExtendedReal> g = grad_mirror_map(map, pi.row(s).transpose());
    for (Eigen::Index a = 0; a < pi.cols(); ++a) {
      if (!g[static_cast<std::size_t>(a)].is_finite())
        throw SupportError(
            "regression target diverges on a zeroed action; use the clip-aware form");
      target(s, a) = q_est(s, a) + g[static_cast<std::size_t>(a)].value() / eta;
    }
  }
  return target;
}

Eigen::MatrixXd regression_target_potential(const Eigen::MatrixXd& q_est,
                                            const Eigen::MatrixXd& f_prev, double eta_prev,
                                            double eta_t, const Eigen::VectorXd& lambda,
                                            const OmegaPotential& map) {
  if (q_est.rows() != f_prev.rows() || q_est.cols() != f_prev.cols() ||
      lambda.size() != q_est.rows())
    throw InputError("regression_target_potential: shape mismatch");
  if (!(eta_t > 0.0) || !(eta_prev > 0.0))
    throw InputError("regression_target_potential: step sizes must be positive");
  const ExtendedReal floor = map.inverse(0.0);
  Eigen::MatrixXd target(q_est.rows(), q_est.cols());
  for (Eigen::Index s = 0; s < q_est.rows(); ++s) {
    const double clip = floor.is_finite() ? floor.value() - lambda[s] : -kInf;
    for (Eigen::Index a = 0; a < q_est.cols(); ++a)
      target(s, a) = q_est(s, a) + std::max(eta_prev * f_prev(s, a), clip) / eta_t;
  }
  return target;
}

AmpoState ampo_init(const TabularMdp& mdp, const OmegaPotential& map) {
  AmpoState st;
  st.t = 0;
  st.pi = uniform_policy(mdp);
  st.f.resize(mdp.n_states, mdp.n_actions);
  const double f0 = map.inverse_finite(1.0 / mdp.n_actions);
  st.f.setConstant(f0);
  st.lambda = Eigen::VectorXd::Zero(mdp.n_states);
  st.eta_prev = 1.0;
  return st;
}

double bregman_to_opt(const OmegaPotential& map, const Eigen::VectorXd& pi_star_row,
                      const Eigen::VectorXd& pi_row) {
  double d = 0.0;
  for (Eigen::Index a = 0; a < pi_row.size(); ++a) {
    const double x = std::max(pi_star_row[a], 0.0), y = std::max(pi_row[a], 0.0);
    if (x == 0.0 && y == 0.0) continue;
    const ExtendedReal g = map.inverse(y);
    if (!g.is_finite()) {
      if (x > 0.0) return kInf;  // mass where the grad diverges
      continue;                  // x = 0 contributes x * (-inf) := 0 plus finite terms
    }
    d += mirror_map_term(map, x) - mirror_map_term(map, y) - g.value() * (x - y);
  }
  return d;
}

IterationRecord ampo_step(AmpoState& state, const AmpoConfig& cfg, const TabularMdp& mdp,
                          const PolicyTable& pi_star, double v_star_mu,
                          const Eigen::VectorXd& d_star, std::mt19937_64& rng) {
  const auto t0 = std::chrono::steady_clock::now();
  const int S = mdp.n_states, A = mdp.n_actions;
  const int t = state.t;

  const ValueTables vt = exact_evaluate(mdp, state.pi);
  const Eigen::VectorXd d_pi = visitation_distribution(mdp, state.pi);

  IterationRecord rec;
  rec.t = t;
  rec.eta = cfg.schedule.eta(t);
  rec.value = mdp.mu.dot(vt.v);
  rec.gap = v_star_mu - rec.value;
  rec.lambda = state.lambda;

  double dstar_div = 0.0, nu = 0.0;
  for (int s = 0; s < S; ++s) {
    if (d_star[s] > 0.0) {
      const double b = bregman_to_opt(cfg.map, pi_star.row(s).transpose(),
                                      state.pi.row(s).transpose());
      dstar_div = std::isinf(b) ? kInf : dstar_div + d_star[s] * b;
      if (d_pi[s] <= 0.0) {
        nu = kInf;
      } else if (!std::isinf(nu)) {
        nu = std::max(nu, d_star[s] / d_pi[s]);
      }
    }
  }
  rec.bregman_to_opt = dstar_div;
  rec.nu = nu;

  // Q estimate for the update.
  Eigen::MatrixXd q_est;
  if (cfg.eval_mode == EvalMode::Exact) {
    q_est = vt.q;
  } else {
    q_est.resize(S, A);
    for (int s = 0; s < S; ++s)
      for (int a = 0; a < A; ++a) {
        double acc = 0.0;
        for (int e = 0; e < cfg.mc_episodes; ++e) acc += mc_q_sample(mdp, state.pi, s, a, rng);
        q_est(s, a) = acc / cfg.mc_episodes;
      }
  }

  const Eigen::MatrixXd target =
      regression_target_potential(q_est, state.f, state.eta_prev, rec.eta, state.lambda, cfg.map);

  RegressionProblem problem;
  problem.weights = regression_weights(cfg, mdp, state.pi, d_pi);
  problem.targets = target;

  Eigen::MatrixXd f_next(S, A);
  if (cfg.family == Family::Tabular) {
    f_next = fit_exact_tabular(problem).theta;
  } else {
    const LinearFit fit = fit_exact_linear(problem, cfg.features);
    for (int s = 0; s < S; ++s)
      for (int a = 0; a < A; ++a) f_next(s, a) = fit.f.evaluate(mdp.row(s, a));
  }
  rec.eps_approx = regression_loss(problem, f_next);

  PolicyTable pi_next(S, A);
  Eigen::VectorXd lambda_next(S);
  for (int s = 0; s < S; ++s) {
    const ProjectionResult pr =
        project(rec.eta * f_next.row(s).transpose(), cfg.map, cfg.projection_precision);
    pi_next.row(s) = pr.dist.transpose();
    lambda_next[s] = pr.lambda;
  }

  // Concentrability over the four visitation/policy pairs of the step.
  const Eigen::VectorXd d_next = visitation_distribution(mdp, pi_next);
  rec.c_v_pairs[0] = concentrability_coefficient(problem.weights, d_star, pi_star);
  rec.c_v_pairs[1] = concentrability_coefficient(problem.weights, d_next, pi_next);
  rec.c_v_pairs[2] = concentrability_coefficient(problem.weights, d_star, state.pi);
  rec.c_v_pairs[3] = concentrability_coefficient(problem.weights, d_next, state.pi);
  rec.c_v = *std::max_element(rec.c_v_pairs.begin(), rec.c_v_pairs.end());

  state.pi = std::move(pi_next);
  state.f = std::move(f_next);
  state.lambda = std::move(lambda_next);
  state.eta_prev = rec.eta;
  state.t = t + 1;

  rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                    .count();

  if (cfg.eval_mode == EvalMode::Exact &&
      !(rec.gap >= -1e-9 && rec.gap <= 1.0 / (1.0 - mdp.gamma) + 1e-9))
    throw NumericalError("optimality gap out of range at iteration " + std::to_string(t));
  if (!std::isfinite(rec.value) || !std::isfinite(rec.eps_approx) || rec.eps_approx < 0.0)
    throw NumericalError("non-finite diagnostic at iteration " + std::to_string(t));
  return rec;
}

AmpoRun run_ampo(const AmpoConfig& cfg, const TabularMdp& mdp) {
  if (cfg.iterations < 0) throw InputError("run_ampo needs a nonnegative iteration count");
  AmpoRun run;
  const OptimalPolicyResult opt = optimal_policy(mdp);
  run.pi_star = opt.pi;
  run.v_star_mu = mdp.mu.dot(opt.values.v);
  run.d_star = visitation_distribution(mdp, opt.pi);

  std::mt19937_64 rng(cfg.seed);
  AmpoState state = ampo_init(mdp, cfg.map);
  run.policies.push_back(state.pi);
  run.records.reserve(static_cast<std::size_t>(cfg.iterations));
  for (int t = 0; t < cfg.iterations; ++t) {
    run.records.push_back(
        ampo_step(state, cfg, mdp, run.pi_star, run.v_star_mu, run.d_star, rng));
    run.policies.push_back(state.pi);
  }
  run.final_state = std::move(state);
  return run;
}

double mc_q_sample(const TabularMdp& mdp, const PolicyTable& pi, int s0, int a0,
                   std::mt19937_64& rng) {
  if (s0 < 0 || s0 >= mdp.n_states || a0 < 0 || a0 >= mdp.n_actions)
    throw InputError("mc_q_sample: bad state or action index");
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  constexpr long kCap = 1000000;
  double q = mdp.reward(s0, a0);
  int s = s0, a = a0;
  for (long n = 0; n < kCap; ++n) {
    if (unif(rng) >= mdp.gamma) return q;
    // Row copies keep strides simple for the scanning sampler.
    const Eigen::RowVectorXd& trow = mdp.transition.row(mdp.row(s, a));
    s = sample_index(trow.data(), mdp.n_states, rng);
    const Eigen::RowVectorXd& prow = pi.row(s);
    a = sample_index(prow.data(), mdp.n_actions, rng);
    q += mdp.reward(s, a);
  }
  throw NumericalError("mc_q_sample exceeded the step cap");
}

std::vector<double> gae_advantages(const std::vector<double>& rewards,
                                   const std::vector<double>& values, double bootstrap,
                                   double gamma, double lambda) {
  if (rewards.size() != values.size()) throw InputError("gae_advantages: size mismatch");
  if (!(gamma >= 0.0 && gamma <= 1.0) || !(lambda >= 0.0 && lambda <= 1.0))
    throw InputError("gae_advantages: gamma and lambda must lie in [0, 1]");
  std::vector<double> adv(rewards.size(), 0.0);
  double next_value = bootstrap, carry = 0.0;
  for (std::size_t i = rewards.size(); i-- > 0;) {
    const double delta = rewards[i] + gamma * next_value - values[i];
    carry = delta + gamma * lambda * carry;
    adv[i] = carry;
    next_value = values[i];
  }
  return adv;
}

}  // namespace ampo
