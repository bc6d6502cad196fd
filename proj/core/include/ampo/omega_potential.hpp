#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "ampo/extended_real.hpp"

namespace ampo {

enum class PotentialKind {
  NegativeEntropy,     // phi(x) = exp(x-1)
  SquaredL2,           // phi(x) = x
  EpsNegativeEntropy,  // phi(x) = exp(x-1) - eps
  Tsallis,             // phi_q(x) = max(0, (q-1)x/q)^(1/(q-1)), q > 0, q != 1
  Hyperbolic,          // phi_b(x) = b sinh(x)
  TanhEntropy,         // phi(x) = tanh(x)/2 + 1/2
};

// An omega-potential: an increasing map phi from (-inf, u) onto (omega, sup),
// with omega <= 0. It induces the mirror map h(pi) = sum_a H(pi_a) where
// H' = phi^{-1}, so grad h(pi)_a = phi^{-1}(pi_a) and the induced Bregman
// projection onto the simplex has the normalize-and-clip form
//   dist_a = max(0, phi(scores_a + lambda)).
class OmegaPotential {
 public:
  static OmegaPotential negative_entropy();
  static OmegaPotential squared_l2();
  static OmegaPotential eps_negative_entropy(double eps);  // eps > 0
  static OmegaPotential tsallis(double q);                 // q > 0; q == 1 falls back to negative_entropy
  static OmegaPotential hyperbolic(double b);              // b > 0
  static OmegaPotential tanh_entropy();

  // Tokens: "entropy", "l2", "eps-entropy:<eps>", "tsallis:<q>",
  // "hyperbolic:<b>", "tanh". Anything else throws InputError.
  static OmegaPotential parse(const std::string& token);
  std::string token() const;

  PotentialKind kind() const { return kind_; }
  double param() const { return param_; }

  ExtendedReal omega() const;       // inf of phi's range
  ExtendedReal domain_sup() const;  // u, sup of phi's domain

  // phi(x). Requires x < u and finite; entropy-family arguments saturate at
  // 700 before exponentiation, sinh arguments clamp to |x| <= 700.
  double value(double x) const;

  // phi^{-1}(y) for y >= 0. NEG_INF marks the boundary y = omega when phi
  // only approaches it (entropy at 0); kinds whose phi reaches 0 at a finite
  // argument (or is clipped to 0 there) return that finite argument.
  ExtendedReal inverse(double y) const;

  // phi^{-1}(y) with a non-finite result turned into NumericalError.
  double inverse_finite(double y) const { return inverse(y).value(); }

  // True for the kinds with a closed-form simplex projection.
  bool has_closed_form_projection() const {
    return kind_ == PotentialKind::NegativeEntropy || kind_ == PotentialKind::SquaredL2 ||
           kind_ == PotentialKind::EpsNegativeEntropy;
  }

 private:
  OmegaPotential(PotentialKind kind, double param) : kind_(kind), param_(param) {}
  PotentialKind kind_;
  double param_;  // eps, q, or b; unused otherwise
};

// Per-coordinate contribution H(p) to the mirror map, with the continuous
// extension at simplex-boundary coordinates (0 log 0 := 0 and friends).
double mirror_map_term(const OmegaPotential& pot, double p);

// h(dist) = sum_a H(dist_a). Requires dist on the probability simplex.
double mirror_map_value(const OmegaPotential& pot, const Eigen::VectorXd& dist);

// grad h(dist)_a = phi^{-1}(dist_a), componentwise.
std::vector<ExtendedReal> grad_mirror_map(const OmegaPotential& pot, const Eigen::VectorXd& dist);

// D_h(x, y) = h(x) - h(y) - <grad h(y), x - y>. Both arguments must lie on
// the simplex; y must have full support whenever the kind's grad diverges at
// 0 (SupportError otherwise).
double bregman_divergence(const OmegaPotential& pot, const Eigen::VectorXd& x,
                          const Eigen::VectorXd& y);

}  // namespace ampo
