#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "wishart/measure.hpp"
#include "wishart/support.hpp"

using namespace wishart;

namespace {

const double kPi = 3.14159265358979323846;

AtomicMeasure two_atom() { return AtomicMeasure({{1.0, 0.7}, {3.0, 0.3}}); }

// single-atom g' = 0 has the closed-form roots 1/(1 -+ sqrt(gamma))
double mp_right_preimage(double gamma) { return 1.0 / (1.0 + std::sqrt(gamma)); }

} // namespace

TEST_CASE("atomic measure construction") {
  AtomicMeasure m({{3.0, 0.25}, {1.0, 0.5}, {3.0, 0.25}});
  CHECK(m.size() == 2);
  CHECK(m.atoms()[0].lambda == 1.0);
  CHECK(m.atoms()[0].weight == doctest::Approx(0.5));
  CHECK(m.atoms()[1].lambda == 3.0);
  CHECK(m.atoms()[1].weight == doctest::Approx(0.5));

  CHECK_THROWS_AS(AtomicMeasure({{1.0, 0.9}}), ValidationError);
  CHECK_THROWS_AS(AtomicMeasure({{-1.0, 1.0}}), ValidationError);
  CHECK_THROWS_AS(ShapeRatio(0.0), ValidationError);
}

TEST_CASE("wishart model induces a merged uniform measure") {
  std::vector<double> lambdas(300, 1.0);
  lambdas[0] = 1.7;
  for (int i = 210; i < 300; ++i) lambdas[i] = 3.0;
  WishartModel model(300, 3000, lambdas);
  CHECK(model.gamma().gamma == doctest::Approx(0.1));
  AtomicMeasure nu = model.spectral_measure();
  REQUIRE(nu.size() == 3);
  CHECK(nu.atoms()[0].lambda == 1.0);
  CHECK(nu.atoms()[0].weight == doctest::Approx(209.0 / 300.0));
  CHECK(nu.atoms()[1].lambda == 1.7);
  CHECK(nu.atoms()[1].weight == doctest::Approx(1.0 / 300.0));
  CHECK(nu.atoms()[2].weight == doctest::Approx(90.0 / 300.0));

  CHECK_THROWS_AS(WishartModel(2, 10, {1.0}), ValidationError);
  CHECK_THROWS_AS(WishartModel(1, 10, {-2.0}), ValidationError);
}

TEST_CASE("g evaluation on closed forms") {
  AtomicMeasure delta1 = AtomicMeasure::dirac(1.0);
  ShapeRatio gamma(0.25);
  CHECK(g_eval(delta1, gamma, 2.0) == doctest::Approx(0.25).epsilon(1e-14));

  // right MP edge b = (1+sqrt(gamma))^2 reached at d = 1/(1+sqrt(gamma))
  double d = mp_right_preimage(0.25);
  CHECK(d == doctest::Approx(2.0 / 3.0));
  CHECK(g_eval(delta1, gamma, d) == doctest::Approx(2.25).epsilon(1e-14));

  CHECK(g_eval(two_atom(), ShapeRatio(0.1), -1.0) ==
        doctest::Approx(-0.9425).epsilon(1e-14));
}

TEST_CASE("g pole guards") {
  AtomicMeasure delta1 = AtomicMeasure::dirac(1.0);
  ShapeRatio gamma(0.25);
  CHECK_THROWS_AS(g_eval(delta1, gamma, Complex(0.0, 0.0)), PoleProximityError);
  CHECK_THROWS_AS(g_eval(delta1, gamma, Complex(1.0 + 1e-15, 0.0)), PoleProximityError);
  CHECK_NOTHROW(g_eval(delta1, gamma, Complex(1.0 + 1e-10, 0.0)));
}

TEST_CASE("analytic derivatives of g") {
  AtomicMeasure delta1 = AtomicMeasure::dirac(1.0);
  ShapeRatio gamma(0.25);
  double d = mp_right_preimage(0.25);
  CHECK(g_deriv(delta1, gamma, d, 1) == doctest::Approx(0.0).epsilon(1e-13));

  // termwise second derivative: 2/z^3 + 2 gamma/(1-z)^3 at z = 2/3
  double z = 2.0 / 3.0;
  double oracle = 2.0 / (z * z * z) + 2.0 * 0.25 / std::pow(1.0 - z, 3.0);
  CHECK(oracle == doctest::Approx(20.25));
  CHECK(g_deriv(delta1, gamma, z, 2) == doctest::Approx(20.25).epsilon(1e-13));

  CHECK_THROWS_AS(g_deriv(delta1, gamma, 0.5, 4), UnsupportedOrderError);
  CHECK_THROWS_AS(g_deriv(delta1, gamma, 0.5, 0), UnsupportedOrderError);
}

TEST_CASE("derivatives match central finite differences") {
  AtomicMeasure nu = two_atom();
  ShapeRatio gamma(0.1);
  const double h = 1e-6;
  for (double x : {-2.0, -0.5, 0.15, 0.2, 0.5, 2.0, 5.0}) {
    double fd = (g_eval(nu, gamma, x + h) - g_eval(nu, gamma, x - h)) / (2.0 * h);
    double exact = g_deriv(nu, gamma, x, 1);
    CHECK(fd == doctest::Approx(exact).epsilon(1e-6));
  }
  for (double x : {-1.0, 0.2, 2.5}) {
    double fd2 =
        (g_deriv(nu, gamma, x + h, 1) - g_deriv(nu, gamma, x - h, 1)) / (2.0 * h);
    CHECK(fd2 == doctest::Approx(g_deriv(nu, gamma, x, 2)).epsilon(1e-6));
    double fd3 =
        (g_deriv(nu, gamma, x + h, 2) - g_deriv(nu, gamma, x - h, 2)) / (2.0 * h);
    CHECK(fd3 == doctest::Approx(g_deriv(nu, gamma, x, 3)).epsilon(1e-5));
  }
}

TEST_CASE("stieltjes fixed point against the MP quadratic") {
  AtomicMeasure delta1 = AtomicMeasure::dirac(1.0);
  ShapeRatio gamma(0.25);
  Complex z(5.0, 1.0);
  Complex m = stieltjes_solve(delta1, gamma, z);
  // single-atom fixed point: gamma z m^2 - (z + gamma - 1) m + 1 = 0 is the
  // quadratic obtained by clearing denominators; check by direct roots of
  // z m^2 - (z + 1 - gamma) m + 1 = 0
  Complex a = z, b = -(z + 1.0 - gamma.gamma), c = 1.0;
  Complex disc = std::sqrt(b * b - 4.0 * a * c);
  Complex r1 = (-b + disc) / (2.0 * a);
  Complex r2 = (-b - disc) / (2.0 * a);
  Complex expected = (r1.imag() < 0.0) ? r1 : r2;
  CHECK(std::abs(m - expected) < 1e-10);
  CHECK(m.imag() < 0.0);
}

TEST_CASE("stieltjes asymptotics m ~ 1/z") {
  AtomicMeasure nu = two_atom();
  ShapeRatio gamma(0.1);
  for (double R : {1e3, 1e4}) {
    Complex z(R, 1.0);
    Complex m = stieltjes_solve(nu, gamma, z);
    CHECK(std::abs(m - 1.0 / z) < 10.0 / (R * R));
  }
}

TEST_CASE("stieltjes solution inverts g") {
  AtomicMeasure nu = two_atom();
  ShapeRatio gamma(0.1);
  Complex z(1.5, 0.01);
  Complex m = stieltjes_solve(nu, gamma, z);
  CHECK(std::abs(g_eval(nu, gamma, m) - z) < 1e-9);
}

TEST_CASE("inverse pair outside the support") {
  AtomicMeasure delta1 = AtomicMeasure::dirac(1.0);
  ShapeRatio gamma(0.25);
  for (double x : {0.05, 3.0, 10.0}) { // outside [0.25, 2.25]
    Complex m = stieltjes_solve(delta1, gamma, Complex(x, 1e-9));
    CHECK(std::abs(g_eval(delta1, gamma, m) - x) < 1e-8);
    CHECK(g_deriv(delta1, gamma, Complex(m.real(), 0.0), 1).real() < 0.0);
  }
}

TEST_CASE("density reproduces the MP closed form") {
  AtomicMeasure delta1 = AtomicMeasure::dirac(1.0);
  ShapeRatio gamma(0.25);
  const double a = 0.25, b = 2.25;
  for (double x : {0.6, 1.0, 1.8}) {
    double oracle = std::sqrt((b - x) * (x - a)) / (2.0 * kPi * x);
    CHECK(density(delta1, gamma, x) == doctest::Approx(oracle).epsilon(1e-4));
  }
  CHECK(density(delta1, gamma, 3.0) == 0.0);
  CHECK(density(delta1, gamma, 0.1) == 0.0);
}

TEST_CASE("density vanishes between the two bulks") {
  AtomicMeasure nu = two_atom();
  ShapeRatio gamma(0.1);
  SupportProfile profile = compute_support(nu, gamma);
  REQUIRE(profile.components.size() == 2);
  double gap_mid = 0.5 * (profile.components[0].b + profile.components[1].a);
  CHECK(density(nu, gamma, gap_mid) == 0.0);
}

TEST_CASE("conjugation symmetry of g") {
  AtomicMeasure nu = two_atom();
  ShapeRatio gamma(0.1);
  Complex z(0.4, 0.3);
  CHECK(std::abs(g_eval(nu, gamma, std::conj(z)) - std::conj(g_eval(nu, gamma, z))) <
        1e-15);
  for (int order : {1, 2, 3})
    CHECK(std::abs(g_deriv(nu, gamma, std::conj(z), order) -
                   std::conj(g_deriv(nu, gamma, z, order))) < 1e-13);
}
