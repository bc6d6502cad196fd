#include "ampo/mdp.hpp"

#include <Eigen/LU>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <vector>

#include "ampo/errors.hpp"

namespace ampo {
namespace {

void check_policy(const TabularMdp& mdp, const PolicyTable& pi, const char* who) {
  if (pi.rows() != mdp.n_states || pi.cols() != mdp.n_actions)
    throw InputError(std::string(who) + ": policy shape mismatch");
  for (int s = 0; s < mdp.n_states; ++s) {
    double sum = 0.0;
    for (int a = 0; a < mdp.n_actions; ++a) {
      if (!std::isfinite(pi(s, a)) || pi(s, a) < -1e-12)
        throw InputError(std::string(who) + ": policy entry off the simplex");
      sum += pi(s, a);
    }
    if (std::abs(sum - 1.0) > 1e-8)
      throw InputError(std::string(who) + ": policy row does not sum to 1");
  }
}

Eigen::MatrixXd policy_transition(const TabularMdp& mdp, const PolicyTable& pi) {
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(mdp.n_states, mdp.n_states);
  for (int s = 0; s < mdp.n_states; ++s)
    for (int a = 0; a < mdp.n_actions; ++a)
      p.row(s) += pi(s, a) * mdp.transition.row(mdp.row(s, a));
  return p;
}

}  // namespace

TabularMdp make_tabular_mdp(int n_states, int n_actions, double gamma, Eigen::MatrixXd reward,
                            Eigen::MatrixXd transition, Eigen::VectorXd mu) {
  if (n_states < 1 || n_actions < 1) throw InputError("mdp needs at least one state and action");
  if (!(gamma >= 0.0 && gamma < 1.0)) throw InputError("mdp needs gamma in [0, 1)");
  if (reward.rows() != n_states || reward.cols() != n_actions)
    throw InputError("mdp reward shape mismatch");
  if (transition.rows() != static_cast<Eigen::Index>(n_states) * n_actions ||
      transition.cols() != n_states)
    throw InputError("mdp transition shape mismatch");
  if (mu.size() != n_states) throw InputError("mdp mu shape mismatch");
  if (!reward.allFinite()) throw InputError("mdp reward has non-finite entries");
  for (Eigen::Index r = 0; r < transition.rows(); ++r) {
    double sum = 0.0;
    for (int s2 = 0; s2 < n_states; ++s2) {
      if (!std::isfinite(transition(r, s2)) || transition(r, s2) < 0.0)
        throw InputError("mdp transition entry invalid");
      sum += transition(r, s2);
    }
    if (std::abs(sum - 1.0) > 1e-9) throw InputError("mdp transition row does not sum to 1");
  }
  double msum = 0.0;
  for (int s = 0; s < n_states; ++s) {
    if (!std::isfinite(mu[s]) || mu[s] < 0.0) throw InputError("mdp mu entry invalid");
    msum += mu[s];
  }
  if (std::abs(msum - 1.0) > 1e-9) throw InputError("mdp mu does not sum to 1");

  TabularMdp mdp;
  mdp.n_states = n_states;
  mdp.n_actions = n_actions;
  mdp.gamma = gamma;
  mdp.reward = std::move(reward);
  mdp.transition = std::move(transition);
  mdp.mu = std::move(mu);
  return mdp;
}

PolicyTable uniform_policy(const TabularMdp& mdp) {
  return PolicyTable::Constant(mdp.n_states, mdp.n_actions, 1.0 / mdp.n_actions);
}

ValueTables exact_evaluate(const TabularMdp& mdp, const PolicyTable& pi) {
  check_policy(mdp, pi, "exact_evaluate");
  const int S = mdp.n_states, A = mdp.n_actions;
  const Eigen::MatrixXd p_pi = policy_transition(mdp, pi);
  Eigen::VectorXd r_pi(S);
  for (int s = 0; s < S; ++s) r_pi[s] = mdp.reward.row(s).dot(pi.row(s));

  const Eigen::MatrixXd lhs = Eigen::MatrixXd::Identity(S, S) - mdp.gamma * p_pi;
  Eigen::VectorXd v = Eigen::PartialPivLU<Eigen::MatrixXd>(lhs).solve(r_pi);

  const double resid = (v - (r_pi + mdp.gamma * p_pi * v)).lpNorm<Eigen::Infinity>();
  if (!(resid <= 1e-9)) throw NumericalError("policy evaluation residual too large");

  ValueTables out;
  out.v = std::move(v);
  out.q.resize(S, A);
  for (int s = 0; s < S; ++s)
    for (int a = 0; a < A; ++a)
      out.q(s, a) = mdp.reward(s, a) + mdp.gamma * mdp.transition.row(mdp.row(s, a)).dot(out.v);
  return out;
}

double policy_value(const TabularMdp& mdp, const PolicyTable& pi) {
  return mdp.mu.dot(exact_evaluate(mdp, pi).v);
}

Eigen::VectorXd visitation_distribution(const TabularMdp& mdp, const PolicyTable& pi) {
  check_policy(mdp, pi, "visitation_distribution");
  const int S = mdp.n_states;
  const Eigen::MatrixXd p_pi = policy_transition(mdp, pi);
  const Eigen::MatrixXd lhs =
      Eigen::MatrixXd::Identity(S, S) - mdp.gamma * p_pi.transpose();
  Eigen::VectorXd d = Eigen::PartialPivLU<Eigen::MatrixXd>(lhs).solve(
      Eigen::VectorXd((1.0 - mdp.gamma) * mdp.mu));
  for (int s = 0; s < S; ++s) {
    if (d[s] < -1e-12) throw NumericalError("visitation solve produced a negative mass");
    if (d[s] < 0.0) d[s] = 0.0;
  }
  if (std::abs(d.sum() - 1.0) > 1e-9)
    throw NumericalError("visitation distribution does not sum to 1");
  return d;
}

Eigen::MatrixXd policy_gradient(const TabularMdp& mdp, const PolicyTable& pi) {
  const ValueTables vt = exact_evaluate(mdp, pi);
  const Eigen::VectorXd d = visitation_distribution(mdp, pi);
  Eigen::MatrixXd g(mdp.n_states, mdp.n_actions);
  for (int s = 0; s < mdp.n_states; ++s)
    g.row(s) = d[s] / (1.0 - mdp.gamma) * vt.q.row(s);
  return g;
}

OptimalPolicyResult optimal_policy(const TabularMdp& mdp) {
  const int S = mdp.n_states, A = mdp.n_actions;
  std::vector<int> act(static_cast<std::size_t>(S), 0);
  auto as_table = [&](const std::vector<int>& acts) {
    PolicyTable pi = PolicyTable::Zero(S, A);
    for (int s = 0; s < S; ++s) pi(s, acts[static_cast<std::size_t>(s)]) = 1.0;
    return pi;
  };

  OptimalPolicyResult out;
  const int cap = S * A + 50;
  for (int it = 0; it < cap; ++it) {
    out.pi = as_table(act);
    out.values = exact_evaluate(mdp, out.pi);
    std::vector<int> next(static_cast<std::size_t>(S), 0);
    for (int s = 0; s < S; ++s) {
      int best = 0;
      for (int a = 1; a < A; ++a)
        if (out.values.q(s, a) > out.values.q(s, best)) best = a;
      next[static_cast<std::size_t>(s)] = best;
    }
    out.iterations = it + 1;
    if (next == act) {
      double resid = 0.0;
      for (int s = 0; s < S; ++s)
        resid = std::max(resid, std::abs(out.values.q.row(s).maxCoeff() - out.values.v[s]));
      if (!(resid <= 1e-10)) throw NumericalError("optimality residual too large");
      return out;
    }
    act = std::move(next);
  }
  throw NumericalError("policy iteration did not converge");
}

double mismatch_coefficient(const TabularMdp& mdp, const PolicyTable& pi_num,
                            const PolicyTable& pi_den) {
  const Eigen::VectorXd dn = visitation_distribution(mdp, pi_num);
  const Eigen::VectorXd dd = visitation_distribution(mdp, pi_den);
  double worst = 0.0;
  for (int s = 0; s < mdp.n_states; ++s) {
    if (dd[s] <= 0.0) {
      if (dn[s] > 0.0) return std::numeric_limits<double>::infinity();
      continue;
    }
    worst = std::max(worst, dn[s] / dd[s]);
  }
  return worst;
}

double concentrability_coefficient(const Eigen::MatrixXd& v, const Eigen::VectorXd& d,
                                   const PolicyTable& pi) {
  if (v.rows() != pi.rows() || v.cols() != pi.cols() || d.size() != pi.rows())
    throw InputError("concentrability_coefficient: shape mismatch");
  double c = 0.0;
  for (Eigen::Index s = 0; s < pi.rows(); ++s)
    for (Eigen::Index a = 0; a < pi.cols(); ++a) {
      const double num = d[s] * pi(s, a);
      if (v(s, a) <= 0.0) {
        if (num > 0.0) return std::numeric_limits<double>::infinity();
        continue;
      }
      c += num * num / v(s, a);
    }
  return c;
}

TabularMdp random_mdp(int n_states, int n_actions, double gamma, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Eigen::MatrixXd reward(n_states, n_actions);
  for (int s = 0; s < n_states; ++s)
    for (int a = 0; a < n_actions; ++a) reward(s, a) = unif(rng);
  Eigen::MatrixXd transition(static_cast<Eigen::Index>(n_states) * n_actions, n_states);
  for (Eigen::Index r = 0; r < transition.rows(); ++r) {
    double sum = 0.0;
    for (int s2 = 0; s2 < n_states; ++s2) {
      // -log(U) draws give a flat Dirichlet row after normalization.
      const double e = -std::log(1.0 - unif(rng));
      transition(r, s2) = e;
      sum += e;
    }
    transition.row(r) /= sum;
  }
  const Eigen::VectorXd mu = Eigen::VectorXd::Constant(n_states, 1.0 / n_states);
  return make_tabular_mdp(n_states, n_actions, gamma, std::move(reward), std::move(transition),
                          mu);
}

TabularMdp canonical_test_mdp() { return random_mdp(5, 3, 0.9, 42); }

void save_mdp(const TabularMdp& mdp, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot open " + path + " for writing");
  out.precision(17);
  out << mdp.n_states << " " << mdp.n_actions << " " << mdp.gamma << "\n";
  for (int s = 0; s < mdp.n_states; ++s) {
    for (int a = 0; a < mdp.n_actions; ++a) out << (a ? " " : "") << mdp.reward(s, a);
    out << "\n";
  }
  for (Eigen::Index r = 0; r < mdp.transition.rows(); ++r) {
    for (int s2 = 0; s2 < mdp.n_states; ++s2) out << (s2 ? " " : "") << mdp.transition(r, s2);
    out << "\n";
  }
  for (int s = 0; s < mdp.n_states; ++s) out << (s ? " " : "") << mdp.mu[s];
  out << "\n";
}

TabularMdp load_mdp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  int S = 0, A = 0;
  double gamma = 0.0;
  if (!(in >> S >> A >> gamma)) throw InputError("malformed mdp header in " + path);
  if (S < 1 || A < 1) throw InputError("malformed mdp header in " + path);
  Eigen::MatrixXd reward(S, A);
  for (int s = 0; s < S; ++s)
    for (int a = 0; a < A; ++a)
      if (!(in >> reward(s, a))) throw InputError("malformed mdp reward block in " + path);
  Eigen::MatrixXd transition(static_cast<Eigen::Index>(S) * A, S);
  for (Eigen::Index r = 0; r < transition.rows(); ++r)
    for (int s2 = 0; s2 < S; ++s2)
      if (!(in >> transition(r, s2))) throw InputError("malformed mdp transition block in " + path);
  Eigen::VectorXd mu(S);
  for (int s = 0; s < S; ++s)
    if (!(in >> mu[s])) throw InputError("malformed mdp mu block in " + path);
  return make_tabular_mdp(S, A, gamma, std::move(reward), std::move(transition), std::move(mu));
}

}  // namespace ampo
