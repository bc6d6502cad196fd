#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>

namespace ampo {

// Finite discounted MDP. transition is (S*A) x S with row s*A + a holding
// P(.|s,a); reward is S x A; mu is the initial state distribution.
struct TabularMdp {
  int n_states = 0;
  int n_actions = 0;
  double gamma = 0.0;
  Eigen::MatrixXd reward;
  Eigen::MatrixXd transition;
  Eigen::VectorXd mu;

  int row(int s, int a) const { return s * n_actions + a; }
};

// Stochastic policy, rows pi(.|s) on the simplex.
using PolicyTable = Eigen::MatrixXd;

struct ValueTables {
  Eigen::VectorXd v;  // S
  Eigen::MatrixXd q;  // S x A
};

struct OptimalPolicyResult {
  PolicyTable pi;
  ValueTables values;
  int iterations = 0;
};

// Validates shapes, row-stochasticity, gamma in [0,1). Throws InputError.
TabularMdp make_tabular_mdp(int n_states, int n_actions, double gamma, Eigen::MatrixXd reward,
                            Eigen::MatrixXd transition, Eigen::VectorXd mu);

PolicyTable uniform_policy(const TabularMdp& mdp);

// Exact policy evaluation: dense solve of (I - gamma P_pi) v = r_pi, then
// q(s,a) = r(s,a) + gamma <P(.|s,a), v>. Residual-checked.
ValueTables exact_evaluate(const TabularMdp& mdp, const PolicyTable& pi);

// V^pi(mu) = <mu, v>.
double policy_value(const TabularMdp& mdp, const PolicyTable& pi);

// Discounted state visitation d(s) = (1-gamma) sum_t gamma^t Pr(s_t = s),
// via the dense solve (I - gamma P_pi^T) d = (1-gamma) mu.
Eigen::VectorXd visitation_distribution(const TabularMdp& mdp, const PolicyTable& pi);

// dV/dpi(a|s) = d(s) q(s,a) / (1-gamma), the policy-gradient-theorem form.
Eigen::MatrixXd policy_gradient(const TabularMdp& mdp, const PolicyTable& pi);

// Policy iteration with greedy improvement, ties broken toward the lowest
// action index. Returns a deterministic policy table.
OptimalPolicyResult optimal_policy(const TabularMdp& mdp);

// max_s d_num(s) / d_den(s) over visitation distributions of the two
// policies; +inf when the denominator vanishes where the numerator does not.
double mismatch_coefficient(const TabularMdp& mdp, const PolicyTable& pi_num,
                            const PolicyTable& pi_den);

// E_{(s,a)~v}[ (d(s) pi(a|s) / v(s,a))^2 ] = sum (d(s) pi(a|s))^2 / v(s,a);
// +inf when v lacks support where d x pi has mass.
double concentrability_coefficient(const Eigen::MatrixXd& v, const Eigen::VectorXd& d,
                                   const PolicyTable& pi);

// Seeded random instance: Dirichlet transition rows, uniform [0,1] rewards,
// uniform mu.
TabularMdp random_mdp(int n_states, int n_actions, double gamma, std::uint64_t seed);

// The fixed 5-state, 3-action, gamma = 0.9 instance used across the
// experiment defaults.
TabularMdp canonical_test_mdp();

// Plain-text serialization at 17 significant digits; round-trips exactly.
void save_mdp(const TabularMdp& mdp, const std::string& path);
TabularMdp load_mdp(const std::string& path);

}  // namespace ampo
