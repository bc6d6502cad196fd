#include "ampo/projection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "ampo/errors.hpp"

namespace ampo {
namespace {

void check_scores(const Eigen::VectorXd& s, const char* who) {
  if (s.size() == 0) throw InputError(std::string(who) + ": empty scores");
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (!std::isfinite(s[i])) throw InputError(std::string(who) + ": non-finite score");
}

}  // namespace

ProjectionResult project_softmax(const Eigen::VectorXd& scores) {
  check_scores(scores, "project_softmax");
  const double m = scores.maxCoeff();
  Eigen::VectorXd w = (scores.array() - m).exp();
  const double z = w.sum();
  ProjectionResult r;
  r.dist = w / z;
  r.lambda = 1.0 - std::log(z) - m;  // phi(s + lambda) = exp(s - m)/z
  return r;
}

ProjectionResult project_euclidean(const Eigen::VectorXd& scores) {
  check_scores(scores, "project_euclidean");
  const Eigen::Index n = scores.size();
  std::vector<double> u(scores.data(), scores.data() + n);
  std::stable_sort(u.begin(), u.end(), std::greater<double>());
  // Largest k whose top-k average leaves u[k-1] above the hyperplane shift.
  double cum = 0.0, tau = 0.0;
  for (Eigen::Index k = 1; k <= n; ++k) {
    cum += u[static_cast<std::size_t>(k - 1)];
    const double cand = (1.0 - cum) / static_cast<double>(k);
    if (u[static_cast<std::size_t>(k - 1)] + cand > 0.0) tau = cand;
  }
  ProjectionResult r;
  r.dist = (scores.array() + tau).max(0.0);
  r.lambda = tau;
  return r;
}

ProjectionResult project_eps_entropy(const Eigen::VectorXd& scores, double eps) {
  check_scores(scores, "project_eps_entropy");
  if (!std::isfinite(eps) || eps <= 0.0) throw InputError("project_eps_entropy needs eps > 0");
  const Eigen::Index n = scores.size();
  const double m = scores.maxCoeff();
  const Eigen::VectorXd y = (scores.array() - m).exp();

  std::vector<double> asc(y.data(), y.data() + n);
  std::stable_sort(asc.begin(), asc.end());
  std::vector<double> suffix(static_cast<std::size_t>(n) + 1, 0.0);
  for (Eigen::Index i = n - 1; i >= 0; --i)
    suffix[static_cast<std::size_t>(i)] =
        suffix[static_cast<std::size_t>(i) + 1] + asc[static_cast<std::size_t>(i)];

  // Smallest support start whose entries all stay positive after the shift;
  // the final index always qualifies, so the scan cannot fall through.
  Eigen::Index star = n - 1;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double keep = static_cast<double>(n - i);
    if ((1.0 + eps * keep) * asc[static_cast<std::size_t>(i)] -
            eps * suffix[static_cast<std::size_t>(i)] >
        0.0) {
      star = i;
      break;
    }
  }
  const double keep = static_cast<double>(n - star);
  const double lam_mult = suffix[static_cast<std::size_t>(star)] / (1.0 + eps * keep);

  ProjectionResult r;
  r.dist = ((y.array() / lam_mult) - eps).max(0.0);
  r.lambda = 1.0 - std::log(lam_mult) - m;
  return r;
}

ProjectionResult project_bisection(const Eigen::VectorXd& scores, const OmegaPotential& pot,
                                   double precision) {
  check_scores(scores, "project_bisection");
  if (!std::isfinite(precision) || precision <= 0.0)
    throw InputError("project_bisection needs precision > 0");
  constexpr int kMaxIter = 200;
  const Eigen::Index n = scores.size();
  const double m = scores.maxCoeff();

  const ExtendedReal inv1 = pot.inverse(1.0);
  if (n == 1) {
    if (!inv1.is_finite()) throw InfeasibleError("unit mass unreachable with one action");
    ProjectionResult r;
    r.dist = Eigen::VectorXd::Ones(1);
    r.lambda = inv1.value() - scores[0];
    return r;
  }

  Eigen::VectorXd x = scores.array() - m;
  auto image = [&](double nu) {
    Eigen::VectorXd d(n);
    for (Eigen::Index a = 0; a < n; ++a) d[a] = std::max(0.0, pot.value(x[a] + nu));
    return d;
  };

  // Bracket: at nu_lo every entry is at most 1/n, at nu_hi the top entry
  // alone reaches 1. When phi never attains 1 (tanh), grow nu_hi until the
  // total mass crosses 1 instead.
  double nu_lo = pot.inverse_finite(1.0 / static_cast<double>(n));
  double nu_hi;
  if (inv1.is_finite()) {
    nu_hi = inv1.value();
  } else {
    double step = 1.0;
    nu_hi = nu_lo;
    int grow = 0;
    for (; grow < kMaxIter; ++grow) {
      nu_hi = nu_lo + step;
      if (image(nu_hi).sum() >= 1.0) break;
      step *= 2.0;
    }
    if (grow == kMaxIter) throw InfeasibleError("unit mass unreachable for this potential");
  }

  Eigen::VectorXd d_lo = image(nu_lo), d_hi = image(nu_hi);
  int it = 0;
  while ((d_hi - d_lo).lpNorm<1>() > precision && it < kMaxIter) {
    const double mid = 0.5 * (nu_lo + nu_hi);
    Eigen::VectorXd d_mid = image(mid);
    if (d_mid.sum() > 1.0) {
      nu_hi = mid;
      d_hi = std::move(d_mid);
    } else {
      nu_lo = mid;
      d_lo = std::move(d_mid);
    }
    ++it;
  }
  if ((d_hi - d_lo).lpNorm<1>() > precision)
    throw NumericalError("projection bisection did not reach the requested precision");

  ProjectionResult r;
  r.dist = d_hi / d_hi.sum();  // exact unit mass; deviation stays within precision
  r.lambda = nu_hi - m;
  r.iterations = it;
  return r;
}

ProjectionResult project(const Eigen::VectorXd& scores, const OmegaPotential& pot,
                         double precision) {
  switch (pot.kind()) {
    case PotentialKind::NegativeEntropy: return project_softmax(scores);
    case PotentialKind::SquaredL2: return project_euclidean(scores);
    case PotentialKind::EpsNegativeEntropy: return project_eps_entropy(scores, pot.param());
    default: return project_bisection(scores, pot, precision);
  }
}

}  // namespace ampo
