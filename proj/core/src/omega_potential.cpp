#include "ampo/omega_potential.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "ampo/errors.hpp"

namespace ampo {
namespace {

// Exponent saturation bound; exp(700) is near the double overflow edge.
constexpr double kExpSat = 700.0;

void check_simplex(const Eigen::VectorXd& p, const char* who) {
  if (p.size() == 0) throw InputError(std::string(who) + ": empty distribution");
  double sum = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    const double v = p[i];
    if (!std::isfinite(v) || v < -1e-12) throw InputError(std::string(who) + ": entry off the simplex");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-8) throw InputError(std::string(who) + ": distribution does not sum to 1");
}

double clamp0(double v) { return v < 0.0 ? 0.0 : v; }

}  // namespace

OmegaPotential OmegaPotential::negative_entropy() { return {PotentialKind::NegativeEntropy, 0.0}; }
OmegaPotential OmegaPotential::squared_l2() { return {PotentialKind::SquaredL2, 0.0}; }

OmegaPotential OmegaPotential::eps_negative_entropy(double eps) {
  if (!std::isfinite(eps) || eps <= 0.0) throw InputError("eps-entropy needs eps > 0");
  return {PotentialKind::EpsNegativeEntropy, eps};
}

OmegaPotential OmegaPotential::tsallis(double q) {
  if (!std::isfinite(q) || q <= 0.0) throw InputError("tsallis needs q > 0");
  if (q == 1.0) return negative_entropy();
  OmegaPotential pot{PotentialKind::Tsallis, q};
  // Empirical monotonicity probe over the domain: strictly increasing where
  // phi > 0, nondecreasing through any clipped region (q > 1 only).
  double prev = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < 64; ++i) {
    double x;
    if (q < 1.0) {
      x = -std::pow(10.0, 8.0 - 16.0 * i / 63.0);  // log-spaced in (-1e8, -1e-8)
    } else {
      x = -5.0 + 55.0 * i / 63.0;
    }
    const double v = pot.value(x);
    if (v < prev || (v > 0.0 && v == prev)) throw InputError("tsallis potential probe is not increasing");
    prev = v;
  }
  return pot;
}

OmegaPotential OmegaPotential::hyperbolic(double b) {
  if (!std::isfinite(b) || b <= 0.0) throw InputError("hyperbolic needs b > 0");
  return {PotentialKind::Hyperbolic, b};
}

OmegaPotential OmegaPotential::tanh_entropy() { return {PotentialKind::TanhEntropy, 0.0}; }

OmegaPotential OmegaPotential::parse(const std::string& token) {
  auto param_after = [&](const std::string& prefix) {
    const std::string rest = token.substr(prefix.size());
    std::size_t pos = 0;
    double v;
    try {
      v = std::stod(rest, &pos);
    } catch (const std::exception&) {
      throw InputError("bad numeric parameter in mirror-map token: " + token);
    }
    if (pos != rest.size()) throw InputError("trailing junk in mirror-map token: " + token);
    return v;
  };
  if (token == "entropy") return negative_entropy();
  if (token == "l2") return squared_l2();
  if (token == "tanh") return tanh_entropy();
  if (token.rfind("eps-entropy:", 0) == 0) return eps_negative_entropy(param_after("eps-entropy:"));
  if (token.rfind("tsallis:", 0) == 0) return tsallis(param_after("tsallis:"));
  if (token.rfind("hyperbolic:", 0) == 0) return hyperbolic(param_after("hyperbolic:"));
  throw InputError("unknown mirror-map token: " + token);
}

std::string OmegaPotential::token() const {
  char buf[64];
  switch (kind_) {
    case PotentialKind::NegativeEntropy: return "entropy";
    case PotentialKind::SquaredL2: return "l2";
    case PotentialKind::TanhEntropy: return "tanh";
    case PotentialKind::EpsNegativeEntropy:
      std::snprintf(buf, sizeof buf, "eps-entropy:%.17g", param_);
      return buf;
    case PotentialKind::Tsallis:
      std::snprintf(buf, sizeof buf, "tsallis:%.17g", param_);
      return buf;
    case PotentialKind::Hyperbolic:
      std::snprintf(buf, sizeof buf, "hyperbolic:%.17g", param_);
      return buf;
  }
  throw InputError("unreachable potential kind");
}

ExtendedReal OmegaPotential::omega() const {
  switch (kind_) {
    case PotentialKind::NegativeEntropy:
    case PotentialKind::TanhEntropy:
      return ExtendedReal::finite(0.0);
    case PotentialKind::EpsNegativeEntropy:
      return ExtendedReal::finite(-param_);
    case PotentialKind::Tsallis:
      return ExtendedReal::finite(0.0);
    case PotentialKind::SquaredL2:
    case PotentialKind::Hyperbolic:
      return ExtendedReal::neg_inf();
  }
  throw InputError("unreachable potential kind");
}

ExtendedReal OmegaPotential::domain_sup() const {
  if (kind_ == PotentialKind::Tsallis && param_ < 1.0) return ExtendedReal::finite(0.0);
  return ExtendedReal::pos_inf();
}

double OmegaPotential::value(double x) const {
  if (std::isnan(x)) throw InputError("potential argument is NaN");
  const ExtendedReal u = domain_sup();
  if (u.is_finite() && x >= u.raw()) throw InputError("potential argument outside domain");
  switch (kind_) {
    case PotentialKind::NegativeEntropy:
      return std::exp(std::min(x - 1.0, kExpSat));
    case PotentialKind::SquaredL2:
      return x;
    case PotentialKind::EpsNegativeEntropy:
      return std::exp(std::min(x - 1.0, kExpSat)) - param_;
    case PotentialKind::Tsallis: {
      const double q = param_;
      const double base = (q - 1.0) * x / q;
      if (base <= 0.0) return 0.0;  // only reachable for q > 1
      return std::pow(base, 1.0 / (q - 1.0));
    }
    case PotentialKind::Hyperbolic:
      return param_ * std::sinh(std::clamp(x, -kExpSat, kExpSat));
    case PotentialKind::TanhEntropy:
      // Logistic form of tanh(x)/2 + 1/2: keeps full relative precision in
      // both tails, where the direct sum cancels to absolute ~1e-17.
      if (x >= 0.0) return 1.0 / (1.0 + std::exp(-2.0 * x));
      {
        const double e = std::exp(2.0 * x);
        return e / (1.0 + e);
      }
  }
  throw InputError("unreachable potential kind");
}

ExtendedReal OmegaPotential::inverse(double y) const {
  if (std::isnan(y) || y < 0.0) throw InputError("potential inverse needs y >= 0");
  switch (kind_) {
    case PotentialKind::NegativeEntropy:
      if (y == 0.0) return ExtendedReal::neg_inf();
      return ExtendedReal::finite(1.0 + std::log(y));
    case PotentialKind::SquaredL2:
      return ExtendedReal::finite(y);
    case PotentialKind::EpsNegativeEntropy:
      return ExtendedReal::finite(1.0 + std::log(y + param_));
    case PotentialKind::Tsallis: {
      const double q = param_;
      if (y == 0.0) {
        // q < 1: phi only approaches 0 as x -> -inf. q > 1: phi is clipped
        // to 0 on x <= 0, and the continuous inverse lands at 0.
        return q < 1.0 ? ExtendedReal::neg_inf() : ExtendedReal::finite(0.0);
      }
      const double x = q * std::pow(y, q - 1.0) / (q - 1.0);
      if (!std::isfinite(x)) return x < 0.0 ? ExtendedReal::neg_inf() : ExtendedReal::pos_inf();
      return ExtendedReal::finite(x);
    }
    case PotentialKind::Hyperbolic:
      return ExtendedReal::finite(std::asinh(y / param_));
    case PotentialKind::TanhEntropy:
      if (y == 0.0) return ExtendedReal::neg_inf();
      if (y == 1.0) return ExtendedReal::pos_inf();
      if (y > 1.0) throw InputError("tanh potential range is (0, 1)");
      // atanh(2y - 1) without forming 2y - 1, stable at both ends.
      return ExtendedReal::finite(0.5 * (std::log(y) - std::log1p(-y)));
  }
  throw InputError("unreachable potential kind");
}

double mirror_map_term(const OmegaPotential& pot, double p) {
  switch (pot.kind()) {
    case PotentialKind::NegativeEntropy:
      return p == 0.0 ? 0.0 : p * std::log(p);
    case PotentialKind::SquaredL2:
      return 0.5 * (p * p - 1.0);
    case PotentialKind::EpsNegativeEntropy: {
      const double eps = pot.param();
      return (p + eps) * std::log(p + eps) - (1.0 + eps) * std::log(1.0 + eps);
    }
    case PotentialKind::Tsallis: {
      const double q = pot.param();
      return (std::pow(p, q) - 1.0) / (q - 1.0);
    }
    case PotentialKind::Hyperbolic: {
      const double b = pot.param();
      return p * std::asinh(p / b) - std::sqrt(p * p + b * b);
    }
    case PotentialKind::TanhEntropy: {
      // (2p-1) atanh(2p-1) / 2 + log(p(1-p)) / 4 collapses to half the
      // binary entropy, which is stable at the corners.
      if (p == 0.0 || p == 1.0) return 0.0;
      return 0.5 * (p * std::log(p) + (1.0 - p) * std::log1p(-p));
    }
  }
  throw InputError("unreachable potential kind");
}

double mirror_map_value(const OmegaPotential& pot, const Eigen::VectorXd& dist) {
  check_simplex(dist, "mirror_map_value");
  double h = 0.0;
  for (Eigen::Index a = 0; a < dist.size(); ++a) h += mirror_map_term(pot, clamp0(dist[a]));
  return h;
}

std::vector<ExtendedReal> grad_mirror_map(const OmegaPotential& pot, const Eigen::VectorXd& dist) {
  check_simplex(dist, "grad_mirror_map");
  std::vector<ExtendedReal> g;
  g.reserve(static_cast<std::size_t>(dist.size()));
  for (Eigen::Index a = 0; a < dist.size(); ++a) g.push_back(pot.inverse(clamp0(dist[a])));
  return g;
}

double bregman_divergence(const OmegaPotential& pot, const Eigen::VectorXd& x,
                          const Eigen::VectorXd& y) {
  check_simplex(x, "bregman_divergence x");
  check_simplex(y, "bregman_divergence y");
  if (x.size() != y.size()) throw InputError("bregman_divergence: size mismatch");
  const std::vector<ExtendedReal> g = grad_mirror_map(pot, y);
  double d = 0.0;
  for (Eigen::Index a = 0; a < x.size(); ++a) {
    if (!g[static_cast<std::size_t>(a)].is_finite())
      throw SupportError("bregman_divergence: grad diverges at a zero of y");
    const double ga = g[static_cast<std::size_t>(a)].value();
    d += mirror_map_term(pot, clamp0(x[a])) - mirror_map_term(pot, clamp0(y[a])) - ga * (x[a] - y[a]);
  }
  return d;
}

}  // namespace ampo
