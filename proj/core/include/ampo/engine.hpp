#pragma once

#include <Eigen/Core>
#include <array>
#include <cstdint>
#include <random>
#include <vector>

#include "ampo/function_approx.hpp"
#include "ampo/mdp.hpp"
#include "ampo/omega_potential.hpp"
#include "ampo/projection.hpp"

namespace ampo {

class StepSizeSchedule {
 public:
  static StepSizeSchedule constant(double eta0);
  // eta_{t+1} = ratio * eta_t with ratio >= 1; ratio = nu/(nu-1) realizes
  // the linear-rate condition for mismatch bound nu.
  static StepSizeSchedule geometric(double eta0, double ratio);
  static StepSizeSchedule sequence(std::vector<double> etas);

  double eta(int t) const;

 private:
  enum class Kind { Constant, Geometric, Sequence };
  Kind kind_ = Kind::Constant;
  double eta0_ = 1.0;
  double ratio_ = 1.0;
  std::vector<double> etas_;
};

enum class EvalMode { Exact, MonteCarlo };
enum class WeightMode { Uniform, OnPolicy, Custom };
enum class Family { Tabular, Linear };

struct AmpoConfig {
  OmegaPotential map = OmegaPotential::negative_entropy();
  StepSizeSchedule schedule = StepSizeSchedule::constant(1.0);
  int iterations = 50;
  double projection_precision = 1e-8;
  EvalMode eval_mode = EvalMode::Exact;
  int mc_episodes = 32;  // per (s,a) pair, MonteCarlo mode
  std::uint64_t seed = 0;
  WeightMode weight_mode = WeightMode::Uniform;
  Eigen::MatrixXd custom_weights;  // S x A, Custom mode
  Family family = Family::Tabular;
  Eigen::MatrixXd features;  // (S*A) x d, Linear family
};

// Snapshot of iterate t, taken before the update to t+1. eta is the step
// size the update used; eps_approx its realized regression loss; lambda the
// per-state normalizers behind pi^t. c_v aggregates the four
// visitation/policy pairs (max), kept individually in c_v_pairs.
struct IterationRecord {
  int t = 0;
  double eta = 0.0;
  double value = 0.0;
  double gap = 0.0;
  double bregman_to_opt = 0.0;
  double eps_approx = 0.0;
  double c_v = 0.0;
  std::array<double, 4> c_v_pairs{};
  double nu = 0.0;
  double wall_ms = 0.0;
  Eigen::VectorXd lambda;
};

struct AmpoState {
  int t = 0;
  PolicyTable pi;
  Eigen::MatrixXd f;       // scores behind pi (S x A)
  Eigen::VectorXd lambda;  // per-state normalizer behind pi
  double eta_prev = 1.0;
};

struct AmpoRun {
  std::vector<IterationRecord> records;
  std::vector<PolicyTable> policies;  // pi^0 .. pi^T
  AmpoState final_state;
  PolicyTable pi_star;
  double v_star_mu = 0.0;
  Eigen::VectorXd d_star;
};

// Line-1 target Q + eta^{-1} grad h(pi). Throws SupportError when the grad
// diverges on a zeroed action; the clip-aware form below covers that case.
Eigen::MatrixXd regression_target_general(const Eigen::MatrixXd& q_est, const PolicyTable& pi,
                                          double eta, const OmegaPotential& map);

// Clip-aware target Q + eta_t^{-1} max(eta_prev f_prev, phi^{-1}(0) -
// lambda_s), finite for every input; equals the general form up to a
// per-state constant wherever no action was clipped.
Eigen::MatrixXd regression_target_potential(const Eigen::MatrixXd& q_est,
                                            const Eigen::MatrixXd& f_prev, double eta_prev,
                                            double eta_t, const Eigen::VectorXd& lambda,
                                            const OmegaPotential& map);

// Uniform pi^0 with matching scores f^0 = phi^{-1}(pi^0), lambda^0 = 0,
// eta_{-1} = 1.
AmpoState ampo_init(const TabularMdp& mdp, const OmegaPotential& map);

// One mirror-descent iteration in place; returns the record for the state
// the step consumed. pi_star/d_star feed the optimality diagnostics.
IterationRecord ampo_step(AmpoState& state, const AmpoConfig& cfg, const TabularMdp& mdp,
                          const PolicyTable& pi_star, double v_star_mu,
                          const Eigen::VectorXd& d_star, std::mt19937_64& rng);

// Full run: computes the optimal policy once, then iterates ampo_step
// cfg.iterations times. Deterministic given cfg.seed.
AmpoRun run_ampo(const AmpoConfig& cfg, const TabularMdp& mdp);

// D_h(pi_star_row, pi_row) with boundary handling: +inf exactly when the
// divergence is genuinely infinite (target has mass where the iterate has
// none and the grad diverges there).
double bregman_to_opt(const OmegaPotential& map, const Eigen::VectorXd& pi_star_row,
                      const Eigen::VectorXd& pi_row);

// Unbiased single-sample estimate of Q^pi(s0, a0): accumulate undiscounted
// rewards, continuing with probability gamma. Throws past 10^6 steps.
double mc_q_sample(const TabularMdp& mdp, const PolicyTable& pi, int s0, int a0,
                   std::mt19937_64& rng);

// Backward lambda-weighted advantage recursion; `bootstrap` is the value
// after the last step (0 at a terminal).
std::vector<double> gae_advantages(const std::vector<double>& rewards,
                                   const std::vector<double>& values, double bootstrap,
                                   double gamma, double lambda);

}  // namespace ampo
