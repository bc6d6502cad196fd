#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "ampo/errors.hpp"
#include "ampo/omega_potential.hpp"
#include "ampo/projection.hpp"

using namespace ampo;

namespace {

Eigen::VectorXd random_scores(std::mt19937_64& rng, int n, double lo = -6.0, double hi = 6.0) {
  std::uniform_real_distribution<double> unif(lo, hi);
  Eigen::VectorXd s(n);
  for (int i = 0; i < n; ++i) s[i] = unif(rng);
  return s;
}

// Oracle objective whose simplex minimizer is the Bregman projection of the
// scores: F(p) = h(p) - <scores, p>.
double projection_objective(const OmegaPotential& pot, const Eigen::VectorXd& p,
                            const Eigen::VectorXd& scores) {
  double f = -scores.dot(p);
  for (Eigen::Index i = 0; i < p.size(); ++i) f += mirror_map_term(pot, p[i]);
  return f;
}

// Dense 1-D scan oracle on the 2-simplex.
double grid_argmin_first_coord(const OmegaPotential& pot, const Eigen::VectorXd& scores, int K) {
  double best = std::numeric_limits<double>::infinity();
  double best_x = 0.0;
  for (int k = 0; k <= K; ++k) {
    const double x = static_cast<double>(k) / K;
    Eigen::VectorXd p(2);
    p << x, 1.0 - x;
    const double obj = projection_objective(pot, p, scores);
    if (obj < best) {
      best = obj;
      best_x = x;
    }
  }
  return best_x;
}

void check_normalizer_invariant(const OmegaPotential& pot, const Eigen::VectorXd& scores,
                                const ProjectionResult& r, double tol) {
  for (Eigen::Index a = 0; a < scores.size(); ++a) {
    const double rebuilt = std::max(0.0, pot.value(scores[a] + r.lambda));
    CHECK(std::abs(rebuilt - r.dist[a]) <= tol);
  }
}

}  // namespace

TEST_CASE("softmax matches the direct formula and normalizer identity") {
  std::mt19937_64 rng(3);
  const OmegaPotential pot = OmegaPotential::negative_entropy();
  for (int i = 0; i < 500; ++i) {
    const int n = 1 + static_cast<int>(rng() % 8);
    const Eigen::VectorXd s = random_scores(rng, n, -30.0, 30.0);
    const ProjectionResult r = project_softmax(s);
    const Eigen::VectorXd direct =
        ((s.array() - s.maxCoeff()).exp() / (s.array() - s.maxCoeff()).exp().sum()).matrix();
    CHECK((r.dist - direct).lpNorm<1>() <= 1e-12);
    CHECK(std::abs(r.dist.sum() - 1.0) <= 1e-12);
    CHECK(r.iterations == 0);
    check_normalizer_invariant(pot, s, r, 1e-12);
  }
}

TEST_CASE("euclidean projection fixed examples") {
  Eigen::VectorXd s(2);
  s << 2.0, 0.0;
  const ProjectionResult r = project_euclidean(s);
  CHECK(r.dist[0] == doctest::Approx(1.0));
  CHECK(r.dist[1] == doctest::Approx(0.0));
  Eigen::VectorXd t(2);
  t << 0.6, 0.4;
  const ProjectionResult rt = project_euclidean(t);
  CHECK(rt.dist[0] == doctest::Approx(0.6));  // already on the simplex
  CHECK(rt.dist[1] == doctest::Approx(0.4));
  Eigen::VectorXd u(3);
  u << 0.5, 0.5, 0.5;
  const ProjectionResult ru = project_euclidean(u);
  for (int a = 0; a < 3; ++a) CHECK(ru.dist[a] == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("euclidean projection optimality against random candidates") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int i = 0; i < 300; ++i) {
    const int n = 2 + static_cast<int>(rng() % 7);
    const Eigen::VectorXd s = random_scores(rng, n, -3.0, 3.0);
    const ProjectionResult r = project_euclidean(s);
    CHECK(std::abs(r.dist.sum() - 1.0) <= 1e-12);
    CHECK(r.dist.minCoeff() >= 0.0);
    const double opt = (r.dist - s).squaredNorm();
    for (int c = 0; c < 30; ++c) {
      Eigen::VectorXd p(n);
      for (int a = 0; a < n; ++a) p[a] = -std::log1p(-unif(rng));
      p /= p.sum();
      CHECK(opt <= (p - s).squaredNorm() + 1e-12);
    }
  }
}

TEST_CASE("euclidean projection is permutation equivariant") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 100; ++i) {
    const int n = 3 + static_cast<int>(rng() % 5);
    const Eigen::VectorXd s = random_scores(rng, n);
    std::vector<int> perm(static_cast<std::size_t>(n));
    for (int a = 0; a < n; ++a) perm[static_cast<std::size_t>(a)] = a;
    std::shuffle(perm.begin(), perm.end(), rng);
    Eigen::VectorXd sp(n);
    for (int a = 0; a < n; ++a) sp[a] = s[perm[static_cast<std::size_t>(a)]];
    const Eigen::VectorXd base = project_euclidean(s).dist;
    const Eigen::VectorXd permuted = project_euclidean(sp).dist;
    for (int a = 0; a < n; ++a)
      CHECK(permuted[a] == doctest::Approx(base[perm[static_cast<std::size_t>(a)]]).epsilon(1e-14));
  }
}

TEST_CASE("eps-entropy sparse example and grid oracle") {
  Eigen::VectorXd s(2);
  s << 3.0, 0.0;
  const ProjectionResult r = project_eps_entropy(s, 0.5);
  CHECK(r.dist[0] == doctest::Approx(1.0));
  CHECK(r.dist[1] == doctest::Approx(0.0));  // clipped by the eps shift

  std::mt19937_64 rng(11);
  for (double eps : {0.1, 0.5, 2.0}) {
    const OmegaPotential pot = OmegaPotential::eps_negative_entropy(eps);
    for (int i = 0; i < 60; ++i) {
      const Eigen::VectorXd scores = random_scores(rng, 2, -4.0, 4.0);
      const ProjectionResult pr = project_eps_entropy(scores, eps);
      const double gx = grid_argmin_first_coord(pot, scores, 20000);
      CHECK(std::abs(pr.dist[0] - gx) <= 2.5 / 20000);
    }
  }
}

TEST_CASE("eps-entropy normalizer identity holds") {
  std::mt19937_64 rng(13);
  for (int i = 0; i < 300; ++i) {
    const double eps = std::exp(std::uniform_real_distribution<double>(-3.0, 1.0)(rng));
    const int n = 2 + static_cast<int>(rng() % 8);
    const Eigen::VectorXd s = random_scores(rng, n);
    const ProjectionResult r = project_eps_entropy(s, eps);
    CHECK(std::abs(r.dist.sum() - 1.0) <= 1e-10);
    CHECK(r.dist.minCoeff() >= 0.0);
    check_normalizer_invariant(OmegaPotential::eps_negative_entropy(eps), s, r, 1e-10);
  }
}

TEST_CASE("bisection agrees with every closed form") {
  std::mt19937_64 rng(17);
  const std::vector<OmegaPotential> closed = {OmegaPotential::negative_entropy(),
                                              OmegaPotential::squared_l2(),
                                              OmegaPotential::eps_negative_entropy(0.1),
                                              OmegaPotential::eps_negative_entropy(1.0)};
  const double precision = 1e-10;
  for (int i = 0; i < 500; ++i) {
    const OmegaPotential& pot = closed[rng() % closed.size()];
    const int n = 2 + static_cast<int>(rng() % 31);
    const Eigen::VectorXd s = random_scores(rng, n);
    const ProjectionResult a = project(s, pot, precision);
    const ProjectionResult b = project_bisection(s, pot, precision);
    CHECK((a.dist - b.dist).lpNorm<1>() <= 2.0 * precision);
    CHECK(b.iterations > 0);
  }
  // The dispatch example: squared-l2 bisection vs the sort-based projection.
  Eigen::VectorXd s(2);
  s << 2.0, 0.0;
  const ProjectionResult viaBisection = project_bisection(s, OmegaPotential::squared_l2(), 1e-10);
  CHECK((viaBisection.dist - project_euclidean(s).dist).lpNorm<1>() <= 1e-8);
}

TEST_CASE("bisection handles every kind on random inputs") {
  std::mt19937_64 rng(19);
  const std::vector<OmegaPotential> kinds = {
      OmegaPotential::negative_entropy(),     OmegaPotential::squared_l2(),
      OmegaPotential::eps_negative_entropy(0.3), OmegaPotential::tsallis(0.5),
      OmegaPotential::tsallis(1.5),           OmegaPotential::tsallis(2.0),
      OmegaPotential::hyperbolic(1.0),        OmegaPotential::hyperbolic(0.3),
      OmegaPotential::tanh_entropy()};
  for (const OmegaPotential& pot : kinds) {
    CAPTURE(pot.token());
    for (int i = 0; i < 150; ++i) {
      const int n = 2 + static_cast<int>(rng() % 15);
      Eigen::VectorXd s = random_scores(rng, n);
      if (pot.domain_sup().is_finite())
        s = (s.array() - s.maxCoeff() - 0.05 + pot.domain_sup().value()).matrix();
      const ProjectionResult r = project(s, pot, 1e-10);
      CHECK(std::abs(r.dist.sum() - 1.0) <= 1e-12);  // renormalized exactly
      CHECK(r.dist.minCoeff() >= 0.0);
      CHECK(std::isfinite(r.lambda));
    }
  }
}

TEST_CASE("grid oracle validates bisection on the 2-simplex for all kinds") {
  std::mt19937_64 rng(23);
  const std::vector<OmegaPotential> kinds = {
      OmegaPotential::tsallis(0.5),    OmegaPotential::tsallis(2.0),
      OmegaPotential::hyperbolic(0.3), OmegaPotential::hyperbolic(1.0),
      OmegaPotential::tanh_entropy()};
  const int K = 20000;
  for (const OmegaPotential& pot : kinds) {
    CAPTURE(pot.token());
    for (int i = 0; i < 40; ++i) {
      Eigen::VectorXd s = random_scores(rng, 2, -4.0, 4.0);
      if (pot.domain_sup().is_finite())
        s = (s.array() - s.maxCoeff() - 0.05 + pot.domain_sup().value()).matrix();
      const ProjectionResult r = project(s, pot, 1e-12);
      CHECK(std::abs(r.dist[0] - grid_argmin_first_coord(pot, s, K)) <= 2.5 / K);
    }
  }
}

TEST_CASE("projection is shift invariant") {
  std::mt19937_64 rng(29);
  const std::vector<OmegaPotential> kinds = {
      OmegaPotential::negative_entropy(), OmegaPotential::squared_l2(),
      OmegaPotential::eps_negative_entropy(0.4), OmegaPotential::hyperbolic(1.0),
      OmegaPotential::tanh_entropy()};
  for (const OmegaPotential& pot : kinds) {
    CAPTURE(pot.token());
    for (int i = 0; i < 60; ++i) {
      const int n = 2 + static_cast<int>(rng() % 6);
      const Eigen::VectorXd s = random_scores(rng, n, -3.0, 3.0);
      const double shift = std::uniform_real_distribution<double>(-5.0, 5.0)(rng);
      const Eigen::VectorXd shifted = s.array() + shift;
      const ProjectionResult a = project(s, pot, 1e-12);
      const ProjectionResult b = project(shifted, pot, 1e-12);
      CHECK((a.dist - b.dist).lpNorm<1>() <= 1e-9);
      CHECK(a.lambda - b.lambda == doctest::Approx(shift).epsilon(1e-7));
    }
  }
}

TEST_CASE("single action dispatch and the tanh degenerate case") {
  Eigen::VectorXd s(1);
  s << -3.7;
  for (const OmegaPotential& pot :
       {OmegaPotential::negative_entropy(), OmegaPotential::squared_l2(),
        OmegaPotential::eps_negative_entropy(0.2), OmegaPotential::hyperbolic(1.0)}) {
    const ProjectionResult r = project(s, pot, 1e-10);
    CHECK(r.dist.size() == 1);
    CHECK(r.dist[0] == doctest::Approx(1.0));
  }
  // tanh never reaches 1, so a singleton simplex is unreachable.
  CHECK_THROWS_AS(project(s, OmegaPotential::tanh_entropy(), 1e-10), InfeasibleError);
}

TEST_CASE("non-finite scores are rejected") {
  Eigen::VectorXd s(2);
  s << 1.0, std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(project(s, OmegaPotential::negative_entropy(), 1e-10), InputError);
  CHECK_THROWS_AS(project(s, OmegaPotential::hyperbolic(1.0), 1e-10), InputError);
  Eigen::VectorXd empty(0);
  CHECK_THROWS_AS(project(empty, OmegaPotential::negative_entropy(), 1e-10), InputError);
}

TEST_CASE("tanh projection keeps tiny coordinates at full relative accuracy") {
  // Score gaps near 20 used to underflow to exact zeros through the naive
  // tanh form; the logistic form keeps them positive and consistent with
  // the normalizer identity.
  Eigen::VectorXd s(3);
  s << 0.25, -9.79, 7.77;
  const ProjectionResult r = project(s, OmegaPotential::tanh_entropy(), 1e-12);
  CHECK(r.dist.minCoeff() > 0.0);
  const OmegaPotential pot = OmegaPotential::tanh_entropy();
  for (int a = 0; a < 3; ++a) {
    const double rebuilt = pot.value(s[a] + r.lambda);
    CHECK(rebuilt == doctest::Approx(r.dist[a]).epsilon(1e-6));
  }
}
