#pragma once

#include <Eigen/Core>

#include "ampo/omega_potential.hpp"

namespace ampo {

// Result of a Bregman projection of dual scores onto the simplex. The
// normalizer is additive: dist[a] == max(0, phi(scores[a] + lambda)) up to
// the method's tolerance (exact for the closed forms).
struct ProjectionResult {
  Eigen::VectorXd dist;
  double lambda = 0.0;
  int iterations = 0;  // bisection steps; 0 for closed forms
};

// Negative entropy: softmax with a max shift before exponentiation.
ProjectionResult project_softmax(const Eigen::VectorXd& scores);

// Squared l2: exact Euclidean projection via descending sort.
ProjectionResult project_euclidean(const Eigen::VectorXd& scores);

// eps-shifted entropy: exact sorted-threshold solution, eps > 0.
ProjectionResult project_eps_entropy(const Eigen::VectorXd& scores, double eps);

// Any omega-potential: bisection on the additive normalizer until the two
// bracket images differ by at most `precision` in l1, then exact
// renormalization. Caps at 200 iterations (NumericalError beyond), reports
// InfeasibleError when unit mass is unreachable on any bracket.
ProjectionResult project_bisection(const Eigen::VectorXd& scores, const OmegaPotential& pot,
                                   double precision);

// Dispatch: closed form when the kind has one, bisection otherwise.
ProjectionResult project(const Eigen::VectorXd& scores, const OmegaPotential& pot,
                         double precision = 1e-8);

}  // namespace ampo
