#include "ampo/checks.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "ampo/engine.hpp"
#include "ampo/errors.hpp"
#include "ampo/function_approx.hpp"
#include "ampo/mdp.hpp"
#include "ampo/omega_potential.hpp"
#include "ampo/projection.hpp"

namespace ampo {
namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

long n_trials(const TheoryCheckOptions& opt, long base, long floor_count) {
  return std::max(floor_count, std::lround(static_cast<double>(base) * opt.trial_scale));
}

SuiteReport begin_suite(const char* name) {
  SuiteReport rep;
  rep.name = name;
  rep.worst_slack = -std::numeric_limits<double>::infinity();
  return rep;
}

// slack > 0 counts as a failure; worst_slack tracks the tightest margin.
void record(SuiteReport& rep, double slack) {
  rep.trials += 1;
  rep.worst_slack = std::max(rep.worst_slack, slack);
  if (slack > 0.0) rep.failures += 1;
}

// Interior point of the simplex: Dirichlet(1) draw mixed with uniform so
// every coordinate stays >= mix/n.
Eigen::VectorXd rand_simplex(std::mt19937_64& rng, int n, double mix = 1e-3) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Eigen::VectorXd p(n);
  for (int i = 0; i < n; ++i) p[i] = -std::log1p(-unif(rng));
  p /= p.sum();
  return (1.0 - mix) * p + Eigen::VectorXd::Constant(n, mix / n);
}

const std::vector<OmegaPotential>& all_kinds() {
  static const std::vector<OmegaPotential> kinds = {
      OmegaPotential::negative_entropy(),
      OmegaPotential::squared_l2(),
      OmegaPotential::eps_negative_entropy(0.1),
      OmegaPotential::eps_negative_entropy(1.0),
      OmegaPotential::tsallis(0.5),
      OmegaPotential::tsallis(1.5),
      OmegaPotential::tsallis(2.0),
      OmegaPotential::hyperbolic(1.0),
      OmegaPotential::hyperbolic(0.3),
      OmegaPotential::tanh_entropy(),
  };
  return kinds;
}

const OmegaPotential& pick_kind(std::mt19937_64& rng) {
  const auto& kinds = all_kinds();
  return kinds[rng() % kinds.size()];
}

// Projection with the falsifiability hook: a deliberately wrong multiplicative
// warp (still a distribution) stands in for a buggy implementation.
ProjectionResult project_hook(const TheoryCheckOptions& opt, const Eigen::VectorXd& scores,
                              const OmegaPotential& pot) {
  ProjectionResult r = project(scores, pot, opt.projection_precision);
  if (opt.break_projection) {
    for (Eigen::Index i = 0; i < r.dist.size(); ++i) r.dist[i] *= (i % 2 == 0) ? 1.35 : 0.65;
    r.dist /= r.dist.sum();
  }
  return r;
}

Eigen::VectorXd grad_finite(const OmegaPotential& pot, const Eigen::VectorXd& p) {
  const std::vector<ExtendedReal> g = grad_mirror_map(pot, p);
  Eigen::VectorXd out(p.size());
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (!g[static_cast<std::size_t>(i)].is_finite())
      throw SupportError("grad_finite: divergent coordinate");
    out[i] = g[static_cast<std::size_t>(i)].value();
  }
  return out;
}

// h extended beyond the simplex (the Bregman geometry lives on the positive
// orthant / potential range); no normalization constraint here.
double h_extended(const OmegaPotential& pot, const Eigen::VectorXd& p) {
  double h = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) h += mirror_map_term(pot, p[i]);
  return h;
}

// D_h(x, y) with an explicitly supplied (sub)gradient at y.
double d_extended(const OmegaPotential& pot, const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                  const Eigen::VectorXd& grad_y) {
  return h_extended(pot, x) - h_extended(pot, y) - grad_y.dot(x - y);
}

TabularMdp small_random_mdp(std::mt19937_64& rng, int s_lo, int s_hi, int a_lo, int a_hi,
                            double gamma) {
  const int S = s_lo + static_cast<int>(rng() % static_cast<std::uint64_t>(s_hi - s_lo + 1));
  const int A = a_lo + static_cast<int>(rng() % static_cast<std::uint64_t>(a_hi - a_lo + 1));
  return random_mdp(S, A, gamma, rng());
}

PolicyTable random_policy(std::mt19937_64& rng, const TabularMdp& mdp, double mix = 1e-2) {
  PolicyTable pi(mdp.n_states, mdp.n_actions);
  for (int s = 0; s < mdp.n_states; ++s) pi.row(s) = rand_simplex(rng, mdp.n_actions, mix).transpose();
  return pi;
}

}  // namespace

SuiteReport suite_three_point_identity(const TheoryCheckOptions& opt) {
  SuiteReport rep = begin_suite("three-point-identity");
  const auto t0 = Clock::now();
  std::mt19937_64 rng(opt.seed ^ 0x1ULL);
  const long trials = n_trials(opt, 10000, 100);
  for (long i = 0; i < trials; ++i) {
    const OmegaPotential& pot = pick_kind(rng);
    const int n = 2 + static_cast<int>(rng() % 7);
    const Eigen::VectorXd x = rand_simplex(rng, n);
    const Eigen::VectorXd y = rand_simplex(rng, n);
    const Eigen::VectorXd z = rand_simplex(rng, n);
    const double lhs =
        bregman_divergence(pot, x, y) + bregman_divergence(pot, y, z) - bregman_divergence(pot, x, z);
    const double rhs = (grad_finite(pot, z) - grad_finite(pot, y)).dot(x - y);
    record(rep, std::abs(lhs - rhs) - 1e-9);
  }
  rep.elapsed_ms = ms_since(t0);
  return rep;
}

SuiteReport suite_bregman_basics(const TheoryCheckOptions& opt) {
  SuiteReport rep = begin_suite("bregman-basics");
  const auto t0 = Clock::now();
  std::mt19937_64 rng(opt.seed ^ 0x2ULL);
  const long trials = n_trials(opt, 10000, 100);
  for (long i = 0; i < trials; ++i) {
    const OmegaPotential& pot = pick_kind(rng);
    const int n = 2 + static_cast<int>(rng() % 7);
    const Eigen::VectorXd x = rand_simplex(rng, n);
    const Eigen::VectorXd y = rand_simplex(rng, n);
    const double dxy = bregman_divergence(pot, x, y);
    double slack = -dxy - 1e-12;                                  // nonnegativity
    slack = std::max(slack, std::abs(bregman_divergence(pot, x, x)) - 1e-12);
    if (pot.kind() == PotentialKind::NegativeEntropy) {
      double kl = 0.0;
      for (int a = 0; a < n; ++a) kl += x[a] * std::log(x[a] / y[a]);
      slack = std::max(slack, std::abs(dxy - kl) - 1e-12);
    }
    if (pot.kind() == PotentialKind::SquaredL2)
      slack = std::max(slack, std::abs(dxy - 0.5 * (x - y).squaredNorm()) - 1e-12);
    record(rep, slack);
  }
  rep.elapsed_ms = ms_since(t0);
  return rep;
}

SuiteReport suite_generalized_pythagorean(const TheoryCheckOptions& opt) {
  SuiteReport rep = begin_suite("generalized-pythagorean");
  const auto t0 = Clock::now();
  std::mt19937_64 rng(opt.seed ^ 0x3ULL);
  std::uniform_real_distribution<double> unif(-3.0, 3.0);
  std::uniform_real_distribution<double> gap(0.05, 5.0);
  const long trials = n_trials(opt, 10000, 100);
  for (long i = 0; i < trials; ++i) {
    const OmegaPotential& pot = pick_kind(rng);
    const int n = 2 + static_cast<int>(rng() % 7);
    // Dual scores inside phi's domain; y = phi(scores) is the unprojected
    // point, generally off the simplex.
    Eigen::VectorXd scores(n);
    const ExtendedReal u = pot.domain_sup();
    for (int a = 0; a < n; ++a) scores[a] = u.is_finite() ? u.value() - gap(rng) : unif(rng);
    Eigen::VectorXd y(n);
    for (int a = 0; a < n; ++a) y[a] = pot.value(scores[a]);
    const ProjectionResult proj = project_hook(opt, scores, pot);
    const Eigen::VectorXd x = rand_simplex(rng, n);
    try {
      const Eigen::VectorXd grad_p = grad_finite(pot, proj.dist);
      const double lhs =
          d_extended(pot, x, proj.dist, grad_p) + d_extended(pot, proj.dist, y, scores);
      const double rhs = d_extended(pot, x, y, scores);
      record(rep, lhs - rhs - 1e-8);
    } catch (const SupportError&) {
      rep.skipped += 1;
    }
  }
  rep.elapsed_ms = ms_since(t0);
  return rep;
}

SuiteReport suite_three_point_descent(const TheoryCheckOptions& opt) {
  SuiteReport rep = begin_suite("three-point-descent");
  const auto t0 = Clock::now();
  std::mt19937_64 rng(opt.seed ^ 0x4ULL);
  std::uniform_real_distribution<double> unif_f(-2.0, 2.0);
  std::uniform_real_distribution<double> unif_log_eta(std::log(0.1), std::log(10.0));
  const long trials = n_trials(opt, 10000, 100);
  for (long i = 0; i < trials; ++i) {
    const OmegaPotential& pot = pick_kind(rng);
    const int n = 2 + static_cast<int>(rng() % 7);
    const Eigen::VectorXd pi_bar = rand_simplex(rng, n);
    const double eta = std::exp(unif_log_eta(rng));
    Eigen::VectorXd f(n);
    for (int a = 0; a < n; ++a) f[a] = unif_f(rng);
    const Eigen::VectorXd scores = eta * f;
    const ProjectionResult proj = project_hook(opt, scores, pot);
    const Eigen::VectorXd& pi_t = proj.dist;
    const Eigen::VectorXd g = scores - grad_finite(pot, pi_bar);
    // The minimizing comparator of the linear part is a vertex, so checking
    // all vertices alongside a random point makes a wrong projection visible.
    std::vector<Eigen::VectorXd> comparators;
    comparators.push_back(rand_simplex(rng, n));
    for (int a = 0; a < n; ++a) comparators.push_back(Eigen::VectorXd::Unit(n, a));
    double slack = -std::numeric_limits<double>::infinity();
    try {
      const double d_tilde_bar = bregman_divergence(pot, pi_t, pi_bar);
      for (const Eigen::VectorXd& pi : comparators) {
        const double lhs = g.dot(pi - pi_t);
        const double rhs =
            bregman_divergence(pot, pi, pi_bar) - d_tilde_bar - bregman_divergence(pot, pi, pi_t);
        slack = std::max(slack, lhs - rhs - 1e-7);
      }
      record(rep, slack);
    } catch (const SupportError&) {
      rep.skipped += 1;
    }
  }
  rep.elapsed_ms = ms_since(t0);
  return rep;
}

SuiteReport suite_performance_difference(const TheoryCheckOptions& opt) {
  SuiteReport rep = begin_suite("performance-difference");
  const auto t0 = Clock::now();
  std::mt19937_64 rng(opt.seed ^ 0x5ULL);
  const double gammas[] = {0.3, 0.6, 0.9, 0.95};
  const long trials = n_trials(opt, 10000, 100);
  for (long i = 0; i < trials; ++i) {
    const TabularMdp mdp = small_random_mdp(rng, 2, 5, 2, 4, gammas[rng() % 4]);
    const PolicyTable pi = random_policy(rng, mdp);
    const PolicyTable pi_ref = random_policy(rng, mdp);
    const ValueTables ev = exact_evaluate(mdp, pi);
    const ValueTables ev_ref = exact_evaluate(mdp, pi_ref);
    const Eigen::VectorXd d = visitation_distribution(mdp, pi);
    const double lhs = mdp.mu.dot(ev.v) - mdp.mu.dot(ev_ref.v);
    double rhs = 0.0;
    for (int s = 0; s < mdp.n_states; ++s)
      for (int a = 0; a < mdp.n_actions; ++a)
        rhs += d[s] * pi(s, a) * (ev_ref.q(s, a) - ev_ref.v[s]);
    rhs /= 1.0 - mdp.gamma;
    record(rep, std::abs(lhs - rhs) - 1e-9 * (1.0 + std::abs(lhs)));
  }
  rep.elapsed_ms = ms_since(t0);
  return rep;
}

SuiteReport suite_pgt_finite_difference(const TheoryCheckOptions& opt) {
  SuiteReport rep = begin_suite("pgt-finite-difference");
  const auto t0 = Clock::now();
  std::mt19937_64 rng(opt.seed ^ 0x6ULL);
  const long mdps = n_trials(opt, 20, 3);
  const double delta = 1e-6;
  for (long i = 0; i < mdps; ++i) {
    const TabularMdp mdp = small_random_mdp(rng, 3, 5, 2, 4, (i % 2 == 0) ? 0.9 : 0.5);
    const PolicyTable pi = random_policy(rng, mdp, 2e-2);
    const Eigen::MatrixXd grad = policy_gradient(mdp, pi);
    for (int probe = 0; probe < 10; ++probe) {
      const int s = static_cast<int>(rng() % static_cast<std::uint64_t>(mdp.n_states));
      const int a = static_cast<int>(rng() % static_cast<std::uint64_t>(mdp.n_actions));
      int b = static_cast<int>(rng() % static_cast<std::uint64_t>(mdp.n_actions));
      if (b == a) b = (a + 1) % mdp.n_actions;
      PolicyTable up = pi;
      up(s, a) += delta;
      up(s, b) -= delta;
      PolicyTable down = pi;
      down(s, a) -= delta;
      down(s, b) += delta;
      const double num = (policy_value(mdp, up) - policy_value(mdp, down)) / (2.0 * delta);
      const double ana = grad(s, a) - grad(s, b);
      record(rep, std::abs(num - ana) - 1e-5 * std::max(1.0, std::abs(ana)));
    }
  }
  rep.elapsed_ms = ms_since(t0);
  return rep;
}

SuiteReport suite_projection_oracles(const TheoryCheckOptions& opt) {
  SuiteReport rep = begin_suite("projection-oracles");
  const auto t0 = Clock::now();
  std::mt19937_64 rng(opt.seed ^ 0x7ULL);
  std::uniform_real_distribution<double> unif(-6.0, 6.0);
  const std::vector<OmegaPotential> closed = {
      OmegaPotential::negative_entropy(),
      OmegaPotential::squared_l2(),
      OmegaPotential::eps_negative_entropy(0.1),
      OmegaPotential::eps_negative_entropy(1.0),
  };
  const long trials = n_trials(opt, 10000, 100);
  for (long i = 0; i < trials; ++i) {
    const OmegaPotential& pot = closed[rng() % closed.size()];
    const int n = 2 + static_cast<int>(rng() % 31);
    Eigen::VectorXd scores(n);
    for (int a = 0; a < n; ++a) scores[a] = unif(rng);
    const ProjectionResult exact = project(scores, pot, opt.projection_precision);
    const ProjectionResult bis = project_bisection(scores, pot, opt.projection_precision);
    record(rep, (exact.dist - bis.dist).lpNorm<1>() - 2.0 * opt.projection_precision);
  }
  // Euclidean sanity against a dense grid over the 2-simplex.
  const long grid_trials = n_trials(opt, 100, 10);
  const int K = 400;
  std::uniform_real_distribution<double> unif2(-2.0, 2.0);
  for (long i = 0; i < grid_trials; ++i) {
    Eigen::VectorXd scores(3);
    for (int a = 0; a < 3; ++a) scores[a] = unif2(rng);
    const ProjectionResult proj = project_euclidean(scores);
    double best = std::numeric_limits<double>::infinity();
    Eigen::VectorXd best_p(3);
    for (int ii = 0; ii <= K; ++ii)
      for (int jj = 0; jj <= K - ii; ++jj) {
        Eigen::VectorXd p(3);
        p << static_cast<double>(ii) / K, static_cast<double>(jj) / K,
            static_cast<double>(K - ii - jj) / K;
        const double obj = (p - scores).squaredNorm();
        if (obj < best) {
          best = obj;
          best_p = p;
        }
      }
    record(rep, (best_p - proj.dist).lpNorm<Eigen::Infinity>() - 2.5 / K);
  }
  rep.elapsed_ms = ms_since(t0);
  return rep;
}

SuiteReport suite_projection_fixed_point(const TheoryCheckOptions& opt) {
  SuiteReport rep = begin_suite("projection-fixed-point");
  const auto t0 = Clock::now();
  std::mt19937_64 rng(opt.seed ^ 0x8ULL);
  const long trials = n_trials(opt, 10000, 100);
  for (long i = 0; i < trials; ++i) {
    const OmegaPotential& pot = pick_kind(rng);
    const int n = 2 + static_cast<int>(rng() % 7);
    const Eigen::VectorXd p = rand_simplex(rng, n);
    const Eigen::VectorXd scores = grad_finite(pot, p);
    const ProjectionResult r = project_hook(opt, scores, pot);
    record(rep, (r.dist - p).lpNorm<Eigen::Infinity>() - (2.0 * opt.projection_precision + 1e-12));
  }
  rep.elapsed_ms = ms_since(t0);
  return rep;
}

SuiteReport suite_quasi_monotonicity(const TheoryCheckOptions& opt) {
  SuiteReport rep = begin_suite("quasi-monotonicity");
  const auto t0 = Clock::now();
  std::mt19937_64 rng(opt.seed ^ 0x9ULL);
  const std::vector<OmegaPotential> kinds = {
      OmegaPotential::negative_entropy(),
      OmegaPotential::squared_l2(),
      OmegaPotential::tsallis(2.0),
      OmegaPotential::hyperbolic(1.0),
  };
  const long mdps = n_trials(opt, 50, 2);
  for (long i = 0; i < mdps; ++i) {
    const TabularMdp mdp = small_random_mdp(rng, 3, 6, 2, 4, 0.9);
    for (const OmegaPotential& pot : kinds) {
      AmpoConfig cfg;
      cfg.map = pot;
      cfg.schedule = StepSizeSchedule::constant(1.0);
      cfg.iterations = 30;
      cfg.projection_precision = 1e-13;
      cfg.seed = rng();
      const AmpoRun run = run_ampo(cfg, mdp);
      for (std::size_t t = 1; t < run.records.size(); ++t)
        record(rep, run.records[t - 1].value - run.records[t].value - 1e-12);
    }
  }
  rep.elapsed_ms = ms_since(t0);
  return rep;
}

SuiteReport suite_npg_equivalence(const TheoryCheckOptions& opt) {
  SuiteReport rep = begin_suite("npg-equivalence");
  const auto t0 = Clock::now();
  std::mt19937_64 rng(opt.seed ^ 0xaULL);
  const long mdps = n_trials(opt, 20, 3);
  const double eta = 0.7;
  const int T = 30;
  for (long i = 0; i < mdps; ++i) {
    const TabularMdp mdp = small_random_mdp(rng, 3, 6, 2, 4, 0.8);
    AmpoConfig cfg;
    cfg.map = OmegaPotential::negative_entropy();
    cfg.schedule = StepSizeSchedule::constant(eta);
    cfg.iterations = T;
    cfg.seed = rng();
    const AmpoRun run = run_ampo(cfg, mdp);
    // Oracle: multiplicative-weights recursion pi^{t+1} propto pi^t exp(eta Q^t).
    PolicyTable pi = uniform_policy(mdp);
    for (int t = 0; t <= T; ++t) {
      record(rep, (run.policies[static_cast<std::size_t>(t)] - pi).lpNorm<Eigen::Infinity>() - 1e-10);
      if (t == T) break;
      const ValueTables ev = exact_evaluate(mdp, pi);
      PolicyTable next(mdp.n_states, mdp.n_actions);
      for (int s = 0; s < mdp.n_states; ++s) {
        Eigen::VectorXd logits =
            (eta * ev.q.row(s) + pi.row(s).array().log().matrix()).transpose();
        logits.array() -= logits.maxCoeff();
        const Eigen::VectorXd w = logits.array().exp();
        next.row(s) = (w / w.sum()).transpose();
      }
      pi = next;
    }
  }
  rep.elapsed_ms = ms_since(t0);
  return rep;
}

namespace {

// Independent Euclidean projection oracle: bisection on the additive shift
// tau with mass(tau) = sum_a max(0, u_a + tau), avoiding the sort-based path
// under test.
Eigen::VectorXd euclidean_project_oracle(const Eigen::VectorXd& u) {
  const int n = static_cast<int>(u.size());
  double lo = -u.maxCoeff();
  double hi = 1.0 / n - u.minCoeff();
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double mass = (u.array() + mid).max(0.0).sum();
    (mass >= 1.0 ? hi : lo) = mid;
  }
  Eigen::VectorXd p = (u.array() + hi).max(0.0);
  return p / p.sum();
}

}  // namespace

SuiteReport suite_pqd_equivalence(const TheoryCheckOptions& opt) {
  SuiteReport rep = begin_suite("pqd-equivalence");
  const auto t0 = Clock::now();
  std::mt19937_64 rng(opt.seed ^ 0xbULL);
  const long mdps = n_trials(opt, 20, 3);
  const double eta = 0.5;
  const int T = 30;
  for (long i = 0; i < mdps; ++i) {
    const TabularMdp mdp = small_random_mdp(rng, 3, 6, 2, 4, 0.8);
    AmpoConfig cfg;
    cfg.map = OmegaPotential::squared_l2();
    cfg.schedule = StepSizeSchedule::constant(eta);
    cfg.iterations = T;
    cfg.seed = rng();
    const AmpoRun run = run_ampo(cfg, mdp);
    // Oracle: projected Q-ascent pi^{t+1} = Proj_2(pi^t + eta Q^t).
    PolicyTable pi = uniform_policy(mdp);
    for (int t = 0; t <= T; ++t) {
      record(rep, (run.policies[static_cast<std::size_t>(t)] - pi).lpNorm<Eigen::Infinity>() - 1e-10);
      if (t == T) break;
      const ValueTables ev = exact_evaluate(mdp, pi);
      PolicyTable next(mdp.n_states, mdp.n_actions);
      for (int s = 0; s < mdp.n_states; ++s) {
        const Eigen::VectorXd u = (pi.row(s) + eta * ev.q.row(s)).transpose();
        next.row(s) = euclidean_project_oracle(u).transpose();
      }
      pi = next;
    }
  }
  rep.elapsed_ms = ms_since(t0);
  return rep;
}

SuiteReport suite_md_grid_consistency(const TheoryCheckOptions& opt) {
  SuiteReport rep = begin_suite("md-grid-consistency");
  const auto t0 = Clock::now();
  std::mt19937_64 rng(opt.seed ^ 0xcULL);
  std::uniform_real_distribution<double> unif_q(0.0, 1.0);
  std::uniform_real_distribution<double> unif_log_eta(std::log(0.1), std::log(5.0));
  const long trials = n_trials(opt, 200, 20);
  const int K = 2000;
  for (long i = 0; i < trials; ++i) {
    const OmegaPotential& pot = pick_kind(rng);
    const Eigen::VectorXd pi_bar = rand_simplex(rng, 2, 1e-2);
    const double eta = std::exp(unif_log_eta(rng));
    Eigen::VectorXd q(2);
    q << unif_q(rng), unif_q(rng);
    const Eigen::VectorXd grad_bar = grad_finite(pot, pi_bar);
    // The projected point solves min_p D_h(p, pi_bar) - eta <Q, p>; compare
    // against a dense scan of the 1D simplex.
    const ProjectionResult proj = project_hook(opt, eta * q + grad_bar, pot);
    double best_obj = std::numeric_limits<double>::infinity();
    double best_x = 0.0;
    for (int k = 0; k <= K; ++k) {
      const double x = static_cast<double>(k) / K;
      Eigen::VectorXd p(2);
      p << x, 1.0 - x;
      const double obj = h_extended(pot, p) - grad_bar.dot(p) - eta * q.dot(p);
      if (obj < best_obj) {
        best_obj = obj;
        best_x = x;
      }
    }
    record(rep, std::abs(best_x - proj.dist[0]) - 2.5 / K);
  }
  rep.elapsed_ms = ms_since(t0);
  return rep;
}

SuiteReport suite_mc_sampler(const TheoryCheckOptions& opt) {
  SuiteReport rep = begin_suite("mc-sampler");
  const auto t0 = Clock::now();
  std::mt19937_64 rng(opt.seed ^ 0xdULL);
  const long mdps = n_trials(opt, 5, 2);
  const long draws = n_trials(opt, 100000, 2000);
  for (long i = 0; i < mdps; ++i) {
    const TabularMdp mdp = small_random_mdp(rng, 3, 4, 2, 3, (i % 2 == 0) ? 0.9 : 0.5);
    const PolicyTable pi = random_policy(rng, mdp);
    const ValueTables ev = exact_evaluate(mdp, pi);
    for (int pair = 0; pair < 10; ++pair) {
      const int s = static_cast<int>(rng() % static_cast<std::uint64_t>(mdp.n_states));
      const int a = static_cast<int>(rng() % static_cast<std::uint64_t>(mdp.n_actions));
      double sum = 0.0;
      double sum_sq = 0.0;
      for (long k = 0; k < draws; ++k) {
        const double v = mc_q_sample(mdp, pi, s, a, rng);
        sum += v;
        sum_sq += v * v;
      }
      const double mean = sum / static_cast<double>(draws);
      const double var =
          std::max(0.0, sum_sq / static_cast<double>(draws) - mean * mean);
      const double se = std::sqrt(var / static_cast<double>(draws));
      record(rep, std::abs(mean - ev.q(s, a)) - 4.0 * se - 1e-12);
    }
  }
  rep.elapsed_ms = ms_since(t0);
  return rep;
}

SuiteReport suite_sgd_gradient(const TheoryCheckOptions& opt) {
  SuiteReport rep = begin_suite("sgd-gradient");
  const auto t0 = Clock::now();
  std::mt19937_64 rng(opt.seed ^ 0xeULL);
  std::normal_distribution<double> normal(0.0, 1.0);
  const long pairs = n_trials(opt, 100, 10);
  const double h = 1e-6;
  for (long i = 0; i < pairs; ++i) {
    const int m = 8 + static_cast<int>(rng() % 25);
    const int d = 3 + static_cast<int>(rng() % 6);
    ShallowReluNet net = make_shallow_relu(m, d, 1.0, rng());
    for (int r = 0; r < m; ++r)
      for (int c = 0; c < d; ++c) net.w(r, c) = 0.1 * normal(rng);
    Eigen::VectorXd x(d);
    for (int k = 0; k < d; ++k) x[k] = normal(rng);
    x /= x.norm();
    const Eigen::VectorXd pre = (net.w0 + net.w) * x + net.b;
    if (pre.cwiseAbs().minCoeff() < 3e-6) {
      rep.skipped += 1;
      continue;
    }
    const Eigen::MatrixXd grad = net_grad_w(net, x);
    for (int probe = 0; probe < 5; ++probe) {
      const int r = static_cast<int>(rng() % static_cast<std::uint64_t>(m));
      const int c = static_cast<int>(rng() % static_cast<std::uint64_t>(d));
      ShallowReluNet up = net;
      up.w(r, c) += h;
      ShallowReluNet down = net;
      down.w(r, c) -= h;
      const double num = (net_value(up, x) - net_value(down, x)) / (2.0 * h);
      record(rep, std::abs(num - grad(r, c)) - 1e-4 * std::max(1.0, std::abs(grad(r, c))));
    }
    // One SGD step matches the explicit update rule.
    const double y_target = normal(rng);
    const double alpha = 1e-2;
    const Eigen::MatrixXd expected =
        net.w - alpha * (net_value(net, x) - y_target) * grad;
    ShallowReluNet stepped = net;
    fit_sgd(
        stepped, 1, alpha,
        [&](std::mt19937_64&) { return std::make_pair(x, y_target); }, rng());
    record(rep, (stepped.w - expected).lpNorm<Eigen::Infinity>() - 1e-12);
  }
  rep.elapsed_ms = ms_since(t0);
  return rep;
}

SuiteReport suite_gae_oracle(const TheoryCheckOptions& opt) {
  SuiteReport rep = begin_suite("gae-oracle");
  const auto t0 = Clock::now();
  std::mt19937_64 rng(opt.seed ^ 0xfULL);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif_gamma(0.8, 1.0);
  std::uniform_real_distribution<double> unif_lambda(0.0, 1.0);
  const long trials = n_trials(opt, 500, 50);
  for (long i = 0; i < trials; ++i) {
    const int T = 1 + static_cast<int>(rng() % 50);
    std::vector<double> rewards(static_cast<std::size_t>(T));
    std::vector<double> values(static_cast<std::size_t>(T));
    for (double& r : rewards) r = normal(rng);
    for (double& v : values) v = normal(rng);
    const double bootstrap = (i % 3 == 0) ? 0.0 : normal(rng);
    const double gamma = unif_gamma(rng);
    const double lambda = unif_lambda(rng);
    const std::vector<double> adv = gae_advantages(rewards, values, bootstrap, gamma, lambda);
    // Forward-sum oracle: A_t = sum_k (gamma lambda)^{k-t} delta_k.
    double worst = 0.0;
    for (int t = 0; t < T; ++t) {
      double acc = 0.0;
      double w = 1.0;
      for (int k = t; k < T; ++k) {
        const double next_v = (k + 1 < T) ? values[static_cast<std::size_t>(k + 1)] : bootstrap;
        acc += w * (rewards[static_cast<std::size_t>(k)] + gamma * next_v -
                    values[static_cast<std::size_t>(k)]);
        w *= gamma * lambda;
      }
      worst = std::max(worst, std::abs(acc - adv[static_cast<std::size_t>(t)]));
    }
    record(rep, worst - 1e-11);
    // lambda = 1 with a zero critic reduces to discounted returns-to-go.
    const std::vector<double> zeros(static_cast<std::size_t>(T), 0.0);
    const std::vector<double> ret = gae_advantages(rewards, zeros, bootstrap, gamma, 1.0);
    double worst_ret = 0.0;
    for (int t = 0; t < T; ++t) {
      double acc = 0.0;
      double w = 1.0;
      for (int k = t; k < T; ++k) {
        acc += w * rewards[static_cast<std::size_t>(k)];
        w *= gamma;
      }
      acc += w * bootstrap;
      worst_ret = std::max(worst_ret, std::abs(acc - ret[static_cast<std::size_t>(t)]));
    }
    record(rep, worst_ret - 1e-11);
  }
  rep.elapsed_ms = ms_since(t0);
  return rep;
}

std::vector<SuiteReport> run_theory_suites(const TheoryCheckOptions& opt) {
  std::vector<SuiteReport> reports;
  reports.push_back(suite_three_point_identity(opt));
  reports.push_back(suite_bregman_basics(opt));
  reports.push_back(suite_generalized_pythagorean(opt));
  reports.push_back(suite_three_point_descent(opt));
  reports.push_back(suite_performance_difference(opt));
  reports.push_back(suite_pgt_finite_difference(opt));
  reports.push_back(suite_projection_oracles(opt));
  reports.push_back(suite_projection_fixed_point(opt));
  reports.push_back(suite_quasi_monotonicity(opt));
  reports.push_back(suite_npg_equivalence(opt));
  reports.push_back(suite_pqd_equivalence(opt));
  reports.push_back(suite_md_grid_consistency(opt));
  reports.push_back(suite_mc_sampler(opt));
  reports.push_back(suite_sgd_gradient(opt));
  reports.push_back(suite_gae_oracle(opt));
  return reports;
}

}  // namespace ampo
