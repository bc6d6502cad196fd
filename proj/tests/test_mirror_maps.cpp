#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Core>
#include <cmath>
#include <random>
#include <vector>

#include "ampo/errors.hpp"
#include "ampo/extended_real.hpp"
#include "ampo/omega_potential.hpp"

using namespace ampo;

namespace {

std::vector<OmegaPotential> every_kind() {
  return {OmegaPotential::negative_entropy(),
          OmegaPotential::squared_l2(),
          OmegaPotential::eps_negative_entropy(0.1),
          OmegaPotential::eps_negative_entropy(1.0),
          OmegaPotential::tsallis(0.5),
          OmegaPotential::tsallis(1.5),
          OmegaPotential::tsallis(2.0),
          OmegaPotential::hyperbolic(1.0),
          OmegaPotential::hyperbolic(0.3),
          OmegaPotential::tanh_entropy()};
}

// Test-side inverse oracle: bracketed bisection on value() alone.
double inverse_by_bisection(const OmegaPotential& pot, double y) {
  double lo = -1.0, hi = 1.0;
  const double sup = pot.domain_sup().is_finite() ? pot.domain_sup().value() : 1e18;
  while (pot.value(std::min(hi, sup - 1e-12)) < y && hi < sup) hi = std::min(hi * 2.0, sup - 1e-12);
  while (pot.value(lo) > y) lo *= 2.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (pot.value(mid) < y ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

Eigen::VectorXd simplex_point(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Eigen::VectorXd p(n);
  for (int i = 0; i < n; ++i) p[i] = -std::log1p(-unif(rng));
  p /= p.sum();
  return 0.99 * p + Eigen::VectorXd::Constant(n, 0.01 / n);
}

}  // namespace

TEST_CASE("extended real sentinels refuse arithmetic") {
  const ExtendedReal inf = ExtendedReal::pos_inf();
  const ExtendedReal ninf = ExtendedReal::neg_inf();
  CHECK(inf.is_pos_inf());
  CHECK(ninf.is_neg_inf());
  CHECK_THROWS_AS(inf.value(), NumericalError);
  CHECK_THROWS_AS(ninf.value(), NumericalError);
  CHECK(ExtendedReal::finite(2.0).value() == 2.0);
  CHECK(max(ninf, ExtendedReal::finite(1.0)).value() == 1.0);
  CHECK(ExtendedReal::finite(3.0) > ExtendedReal::finite(2.0));
  CHECK(ninf < ExtendedReal::finite(-1e300));
}

TEST_CASE("token parse round-trips and rejects junk") {
  for (const OmegaPotential& pot : every_kind()) {
    const OmegaPotential back = OmegaPotential::parse(pot.token());
    CHECK(back.kind() == pot.kind());
    CHECK(back.param() == doctest::Approx(pot.param()));
  }
  CHECK_THROWS_AS(OmegaPotential::parse("sofmax"), InputError);
  CHECK_THROWS_AS(OmegaPotential::parse("eps-entropy:"), InputError);
  CHECK_THROWS_AS(OmegaPotential::parse("eps-entropy:0"), InputError);
  CHECK_THROWS_AS(OmegaPotential::parse("eps-entropy:-1"), InputError);
  CHECK_THROWS_AS(OmegaPotential::parse("tsallis:0"), InputError);
  CHECK_THROWS_AS(OmegaPotential::parse("tsallis:-2"), InputError);
  CHECK_THROWS_AS(OmegaPotential::parse("hyperbolic:0"), InputError);
  CHECK_THROWS_AS(OmegaPotential::parse("tsallis:1.5x"), InputError);
  CHECK(OmegaPotential::parse("tsallis:1").kind() == PotentialKind::NegativeEntropy);
  CHECK(OmegaPotential::tsallis(1.0).kind() == PotentialKind::NegativeEntropy);
}

TEST_CASE("potentials are increasing with the advertised range floor") {
  std::mt19937_64 rng(7);
  for (const OmegaPotential& pot : every_kind()) {
    CAPTURE(pot.token());
    const double sup = pot.domain_sup().is_finite() ? pot.domain_sup().value() : 30.0;
    double prev = -std::numeric_limits<double>::infinity();
    const double omega = pot.omega().is_finite()
                             ? pot.omega().value()
                             : -std::numeric_limits<double>::infinity();
    for (int i = 0; i < 400; ++i) {
      const double x = -30.0 + (sup + 30.0 - 1e-9) * i / 399.0;
      const double v = pot.value(x);
      CHECK(v >= prev);      // nondecreasing (clipped kinds flatten at 0)
      CHECK(v >= omega);     // never dips below the range floor
      prev = v;
    }
  }
}

TEST_CASE("closed-form inverse matches a bisection oracle") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (const OmegaPotential& pot : every_kind()) {
    CAPTURE(pot.token());
    for (int i = 0; i < 200; ++i) {
      double y = 0.02 + 0.96 * unif(rng);  // interior of (0, 1): valid for every kind
      const ExtendedReal x = pot.inverse(y);
      REQUIRE(x.is_finite());
      CHECK(x.value() == doctest::Approx(inverse_by_bisection(pot, y)).epsilon(1e-9));
      CHECK(pot.value(x.value()) == doctest::Approx(y).epsilon(1e-9));
    }
  }
}

TEST_CASE("inverse boundary semantics at zero") {
  CHECK(OmegaPotential::negative_entropy().inverse(0.0).is_neg_inf());
  CHECK(OmegaPotential::tanh_entropy().inverse(0.0).is_neg_inf());
  CHECK(OmegaPotential::tsallis(0.5).inverse(0.0).is_neg_inf());
  CHECK(OmegaPotential::squared_l2().inverse(0.0).value() == 0.0);
  CHECK(OmegaPotential::hyperbolic(2.0).inverse(0.0).value() == 0.0);
  CHECK(OmegaPotential::tsallis(2.0).inverse(0.0).value() == 0.0);
  CHECK(OmegaPotential::eps_negative_entropy(0.5).inverse(0.0).value() ==
        doctest::Approx(1.0 + std::log(0.5)));
  CHECK(OmegaPotential::tanh_entropy().inverse(1.0).is_pos_inf());
  CHECK_THROWS_AS(OmegaPotential::tanh_entropy().inverse(1.5), InputError);
}

TEST_CASE("specific potential values match hand calculations") {
  CHECK(OmegaPotential::negative_entropy().value(1.0) == doctest::Approx(1.0));
  CHECK(OmegaPotential::squared_l2().value(0.37) == 0.37);
  CHECK(OmegaPotential::eps_negative_entropy(0.25).value(1.0) == doctest::Approx(0.75));
  CHECK(OmegaPotential::hyperbolic(2.0).value(0.0) == 0.0);
  CHECK(OmegaPotential::tanh_entropy().value(0.0) == doctest::Approx(0.5));
  // q = 2: phi(x) = max(0, x/2); q = 0.5: phi(x) = (-x)^{-2} on x < 0.
  CHECK(OmegaPotential::tsallis(2.0).value(3.0) == doctest::Approx(1.5));
  CHECK(OmegaPotential::tsallis(2.0).value(-1.0) == 0.0);
  CHECK(OmegaPotential::tsallis(0.5).value(-2.0) == doctest::Approx(0.25));
  CHECK_THROWS_AS(OmegaPotential::tsallis(0.5).value(0.5), InputError);
  // Saturation keeps huge arguments finite instead of overflowing.
  CHECK(std::isfinite(OmegaPotential::negative_entropy().value(5000.0)));
  CHECK(std::isfinite(OmegaPotential::hyperbolic(1.0).value(5000.0)));
}

TEST_CASE("mirror map term differentiates to the inverse potential") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> unif(0.05, 0.95);
  const double h = 1e-6;
  for (const OmegaPotential& pot : every_kind()) {
    CAPTURE(pot.token());
    for (int i = 0; i < 100; ++i) {
      const double p = unif(rng);
      const double num =
          (mirror_map_term(pot, p + h) - mirror_map_term(pot, p - h)) / (2.0 * h);
      const double ana = pot.inverse(p).value();
      CHECK(num == doctest::Approx(ana).epsilon(1e-5));
    }
  }
}

TEST_CASE("mirror map value validates the simplex") {
  const OmegaPotential pot = OmegaPotential::negative_entropy();
  Eigen::VectorXd good(2);
  good << 0.25, 0.75;
  CHECK(mirror_map_value(pot, good) == doctest::Approx(0.25 * std::log(0.25) + 0.75 * std::log(0.75)));
  Eigen::VectorXd bad_sum(2);
  bad_sum << 0.5, 0.6;
  CHECK_THROWS_AS(mirror_map_value(pot, bad_sum), InputError);
  Eigen::VectorXd negative(2);
  negative << 1.2, -0.2;
  CHECK_THROWS_AS(mirror_map_value(pot, negative), InputError);
}

TEST_CASE("bregman divergence closed forms and axioms") {
  std::mt19937_64 rng(17);
  for (const OmegaPotential& pot : every_kind()) {
    CAPTURE(pot.token());
    for (int i = 0; i < 200; ++i) {
      const int n = 2 + static_cast<int>(rng() % 5);
      const Eigen::VectorXd x = simplex_point(rng, n);
      const Eigen::VectorXd y = simplex_point(rng, n);
      const double d = bregman_divergence(pot, x, y);
      CHECK(d >= -1e-12);
      CHECK(std::abs(bregman_divergence(pot, x, x)) <= 1e-12);
      if (pot.kind() == PotentialKind::NegativeEntropy) {
        double kl = 0.0;
        for (int a = 0; a < n; ++a) kl += x[a] * std::log(x[a] / y[a]);
        CHECK(d == doctest::Approx(kl).epsilon(1e-10));
      }
      if (pot.kind() == PotentialKind::SquaredL2)
        CHECK(d == doctest::Approx(0.5 * (x - y).squaredNorm()).epsilon(1e-10));
    }
  }
}

TEST_CASE("bregman divergence flags divergent support") {
  Eigen::VectorXd x(2), y(2);
  x << 0.5, 0.5;
  y << 1.0, 0.0;
  CHECK_THROWS_AS(bregman_divergence(OmegaPotential::negative_entropy(), x, y), SupportError);
  CHECK_THROWS_AS(bregman_divergence(OmegaPotential::tsallis(0.5), x, y), SupportError);
  // Kinds whose grad stays finite at zero accept boundary y.
  CHECK(bregman_divergence(OmegaPotential::squared_l2(), x, y) ==
        doctest::Approx(0.5 * (x - y).squaredNorm()));
  CHECK(std::isfinite(bregman_divergence(OmegaPotential::tsallis(2.0), x, y)));
  CHECK(std::isfinite(bregman_divergence(OmegaPotential::hyperbolic(1.0), x, y)));
  CHECK(std::isfinite(bregman_divergence(OmegaPotential::eps_negative_entropy(0.1), x, y)));
}

TEST_CASE("tanh potential stays relatively accurate in the deep tail") {
  const OmegaPotential pot = OmegaPotential::tanh_entropy();
  for (double x : {-25.0, -50.0, -120.0}) {
    const double y = pot.value(x);
    CHECK(y > 0.0);
    // exact tail: sigma(2x) = exp(2x)/(1+exp(2x)) ~ exp(2x)
    CHECK(y == doctest::Approx(std::exp(2.0 * x)).epsilon(1e-9));
    CHECK(pot.inverse(y).value() == doctest::Approx(x).epsilon(1e-12));
  }
}

TEST_CASE("tsallis construction rejects non-positive q") {
  CHECK_THROWS_AS(OmegaPotential::tsallis(0.0), InputError);
  CHECK_THROWS_AS(OmegaPotential::tsallis(-1.0), InputError);
}
