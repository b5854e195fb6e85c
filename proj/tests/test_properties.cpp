#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "wishart/fredholm.hpp"
#include "wishart/measure.hpp"
#include "wishart/montecarlo.hpp"
#include "wishart/quadrature.hpp"
#include "wishart/rng.hpp"
#include "wishart/specfun.hpp"
#include "wishart/support.hpp"

using namespace wishart;

namespace {

constexpr std::uint64_t kMasterSeed = 0x5EEDBA5EULL;
constexpr int kCases = 100;

struct MeasureCase {
  AtomicMeasure nu;
  double gamma;
};

/// 1-3 atoms in [0.3, 4], gamma in [0.15, 5] staying away from the
/// near-degenerate hard-edge band
MeasureCase random_measure(TrialRng& rng) {
  int atoms = 1 + static_cast<int>(rng.uniform() * 3.0);
  std::vector<Atom> a;
  double total = 0.0;
  for (int i = 0; i < atoms; ++i) {
    double lambda = 0.3 * std::pow(4.0 / 0.3, rng.uniform());
    double weight = 0.2 + rng.uniform();
    a.push_back({lambda, weight});
    total += weight;
  }
  for (Atom& atom : a) atom.weight /= total;
  double gamma = 0.15 * std::pow(5.0 / 0.15, rng.uniform());
  if (std::abs(gamma - 1.0) < 0.05) gamma += 0.1;
  return {AtomicMeasure(std::move(a)), gamma};
}

/// bulk mass carried by the density: integral over the support with a
/// sqrt substitution at a hard left edge
double bulk_mass(const AtomicMeasure& nu, ShapeRatio gamma, const SupportProfile& p) {
  double mass = 0.0;
  for (const auto& comp : p.components) {
    if (comp.a < 1e-9) {
      // x = b t^2 turns the 1/sqrt(x) hard-edge divergence into a smooth integrand
      QuadratureRule rule = gauss_legendre(128, 0.0, 1.0);
      for (int i = 0; i < 128; ++i) {
        double t = rule.nodes[i];
        double x = comp.b * t * t;
        if (x <= 0.0) continue;
        mass += rule.weights[i] * 2.0 * comp.b * t * density(nu, gamma, x);
      }
    } else {
      QuadratureRule rule = gauss_legendre(128, comp.a, comp.b);
      for (int i = 0; i < 128; ++i)
        mass += rule.weights[i] * density(nu, gamma, rule.nodes[i]);
    }
  }
  return mass;
}

} // namespace

TEST_CASE("property: g is conjugate-symmetric") {
  TrialRng rng(kMasterSeed, 1);
  for (int c = 0; c < kCases; ++c) {
    MeasureCase mc = random_measure(rng);
    Complex z(4.0 * rng.uniform() - 2.0, 0.1 + 2.0 * rng.uniform());
    ShapeRatio gamma(mc.gamma);
    Complex direct = g_eval(mc.nu, gamma, std::conj(z));
    Complex mirrored = std::conj(g_eval(mc.nu, gamma, z));
    CHECK(std::abs(direct - mirrored) < 1e-13 * (1.0 + std::abs(direct)));
    int order = 1 + static_cast<int>(rng.uniform() * 3.0);
    CHECK(std::abs(g_deriv(mc.nu, gamma, std::conj(z), order) -
                   std::conj(g_deriv(mc.nu, gamma, z, order))) <
          1e-12 * (1.0 + std::abs(g_deriv(mc.nu, gamma, z, order))));
  }
}

TEST_CASE("property: derivatives match finite differences off the poles") {
  TrialRng rng(kMasterSeed, 2);
  int checked = 0;
  for (int c = 0; c < kCases; ++c) {
    MeasureCase mc = random_measure(rng);
    ShapeRatio gamma(mc.gamma);
    double x = -3.0 + 9.0 * rng.uniform();
    bool near_pole = std::abs(x) < 1e-2;
    for (const Atom& a : mc.nu.atoms())
      if (std::abs(x - 1.0 / a.lambda) < 1e-2) near_pole = true;
    if (near_pole) continue;
    const double h = 1e-6;
    double fd = (g_eval(mc.nu, gamma, x + h) - g_eval(mc.nu, gamma, x - h)) / (2.0 * h);
    double exact = g_deriv(mc.nu, gamma, x, 1);
    CHECK(std::abs(fd - exact) <= 1e-6 * std::max(1.0, std::abs(exact)));
    ++checked;
  }
  CHECK(checked > 60);
}

TEST_CASE("property: stieltjes inverts g outside the support") {
  TrialRng rng(kMasterSeed, 3);
  for (int c = 0; c < kCases; ++c) {
    MeasureCase mc = random_measure(rng);
    ShapeRatio gamma(mc.gamma);
    SupportProfile p = compute_support(mc.nu, gamma);
    // a point beyond the top edge or inside a gap
    double x;
    if (p.components.size() > 1 && rng.uniform() < 0.5)
      x = 0.5 * (p.components[0].b + p.components[1].a);
    else
      x = p.components.back().b * (1.1 + rng.uniform());
    Complex m = stieltjes_solve(mc.nu, gamma, Complex(x, 1e-9));
    CHECK(std::abs(g_eval(mc.nu, gamma, m) - Complex(x, 1e-9)) < 1e-8);
    CHECK(g_deriv(mc.nu, gamma, Complex(m.real(), 0.0), 1).real() < 0.0);
  }
}

TEST_CASE("property: density mass plus the zero atom is one") {
  TrialRng rng(kMasterSeed, 4);
  for (int c = 0; c < 30; ++c) { // quadrature-heavy: 30 random + the MP pins
    MeasureCase mc = random_measure(rng);
    ShapeRatio gamma(mc.gamma);
    SupportProfile p = compute_support(mc.nu, gamma);
    double mass = bulk_mass(mc.nu, gamma, p);
    CHECK(std::abs(mass + p.zero_mass - 1.0) <= 1e-3);
  }
  // gamma = 1 hard edge handled through the sqrt substitution
  AtomicMeasure delta1 = AtomicMeasure::dirac(1.0);
  SupportProfile p1 = compute_support(delta1, ShapeRatio(1.0));
  CHECK(std::abs(bulk_mass(delta1, ShapeRatio(1.0), p1) - 1.0) <= 1e-3);
}

TEST_CASE("property: edges pair with critical points") {
  TrialRng rng(kMasterSeed, 5);
  for (int c = 0; c < kCases; ++c) {
    MeasureCase mc = random_measure(rng);
    ShapeRatio gamma(mc.gamma);
    SupportProfile p = compute_support(mc.nu, gamma);
    std::vector<EdgeReport> edges = find_edges(mc.nu, gamma);
    CHECK(edges.size() == 2 * p.components.size());
    for (const EdgeReport& e : edges) {
      if (e.hard) {
        CHECK(e.position == 0.0);
        CHECK(e.side == Side::Left);
        continue;
      }
      CHECK(std::abs(g_deriv(mc.nu, gamma, e.preimage, 1)) < 1e-10);
      CHECK(std::abs(g_eval(mc.nu, gamma, e.preimage) - e.position) < 1e-10);
      CHECK((e.side == Side::Left ? e.second_deriv < 0.0 : e.second_deriv > 0.0));
      CHECK(e.scaling > 0.0);
      CHECK(std::isfinite(e.scaling));
    }
  }
}

TEST_CASE("property: kernels are symmetric at random points") {
  TrialRng rng(kMasterSeed, 6);
  for (int c = 0; c < 20; ++c) {
    double x = -3.0 + 6.0 * rng.uniform();
    double y = -3.0 + 6.0 * rng.uniform();
    CHECK(airy_kernel(x, y) == doctest::Approx(airy_kernel(y, x)).epsilon(1e-13));
    double u = 0.1 + 5.0 * rng.uniform();
    double v = 0.1 + 5.0 * rng.uniform();
    int alpha = static_cast<int>(rng.uniform() * 4.0);
    CHECK(bessel_kernel(alpha, u, v) ==
          doctest::Approx(bessel_kernel(alpha, v, u)).epsilon(1e-13));
    // contour form after removing the conjugation factor (x/y)^{alpha/2}
    double conj_removed = bessel_kernel_contour(alpha, u, v, 0.8, 2.5) *
                          std::pow(v / u, 0.5 * alpha);
    double swapped = bessel_kernel_contour(alpha, v, u, 0.8, 2.5) *
                     std::pow(u / v, 0.5 * alpha);
    CHECK(conj_removed == doctest::Approx(swapped).epsilon(1e-7).scale(1e-10));
  }
}

TEST_CASE("property: deformed kernel at k = 0 equals the airy kernel on a grid") {
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 5; ++j) {
      double x = -2.0 + 5.0 * i / 4.0;
      double y = -2.0 + 5.0 * j / 4.0;
      CHECK(std::abs(deformed_airy_kernel(0, x, y) - airy_kernel(x, y)) < 1e-8);
    }
  }
}

TEST_CASE("property: airy kernel diagonal is nonnegative") {
  for (int i = 0; i <= 40; ++i) {
    double x = -10.0 + 0.5 * i;
    CHECK(airy_kernel(x, x) >= 0.0);
  }
}

TEST_CASE("property: contour radii do not change the bessel contour kernel") {
  TrialRng rng(kMasterSeed, 7);
  for (int c = 0; c < 20; ++c) {
    int alpha = static_cast<int>(rng.uniform() * 3.0);
    double x = 0.2 + 3.0 * rng.uniform();
    double y = 0.2 + 3.0 * rng.uniform();
    double r1 = 0.4 + 0.6 * rng.uniform();
    double r2 = 0.4 + 0.6 * rng.uniform();
    double a = bessel_kernel_contour(alpha, x, y, r1, r1 + 1.0 + rng.uniform());
    double b = bessel_kernel_contour(alpha, x, y, r2, r2 + 1.5);
    CHECK(std::abs(a - b) < 1e-8);
  }
}

TEST_CASE("property: gap probabilities stay in the unit interval") {
  TrialRng rng(kMasterSeed, 8);
  for (int c = 0; c < kCases; ++c) {
    double s = -6.0 + 10.0 * rng.uniform();
    double f = tw_cdf(s);
    CHECK(f >= 0.0);
    CHECK(f <= 1.0);
    double g = bessel_gap(static_cast<int>(rng.uniform() * 3.0), 0.1 + 8.0 * rng.uniform());
    CHECK(g >= 0.0);
    CHECK(g <= 1.0);
  }
}

TEST_CASE("property: tw is nondecreasing and bessel gap nonincreasing on grids") {
  double prev = -1.0;
  for (int i = 0; i < 50; ++i) {
    double f = tw_cdf(-5.0 + 0.2 * i);
    CHECK(f >= prev - 1e-10);
    prev = f;
  }
  prev = 2.0;
  for (int i = 1; i <= 50; ++i) {
    double g = bessel_gap(1, 0.2 * i);
    CHECK(g <= prev + 1e-10);
    prev = g;
  }
}

TEST_CASE("property: nystrom estimates shrink on a random smooth kernel") {
  TrialRng rng(kMasterSeed, 9);
  double a = 0.5 + rng.uniform();
  auto kernel = [a](double x, double y) { return a * std::exp(-x * y) / (1.0 + x + y); };
  double e8 = fredholm_det(kernel, 0.0, 3.0, 8).error_estimate;
  double e16 = fredholm_det(kernel, 0.0, 3.0, 16).error_estimate;
  CHECK(e16 < e8);
}

TEST_CASE("property: exact separation keeps the two-bulk gap empty") {
  // Fig-1 population at N = 2000: no eigenvalue falls in the middle 80% of
  // the gap between the two bulk components over 200 trials
  std::vector<double> lambdas;
  lambdas.insert(lambdas.end(), 140, 1.0);
  lambdas.insert(lambdas.end(), 60, 3.0);
  WishartModel model(200, 2000, lambdas); // gamma_N = 0.1, nu = 0.7 d1 + 0.3 d3
  SupportProfile p = compute_support(model.spectral_measure(), model.gamma());
  REQUIRE(p.components.size() == 2);
  double gap_lo = p.components[0].b;
  double gap_hi = p.components[1].a;
  double width = gap_hi - gap_lo;
  double test_lo = gap_lo + 0.1 * width;
  double test_hi = gap_hi - 0.1 * width;
  long violations = 0;
  for (int t = 0; t < 200; ++t) {
    std::vector<double> draw = sample_wishart(model, 424242, t);
    for (double v : draw)
      if (v > test_lo && v < test_hi) ++violations;
  }
  CHECK(violations == 0);
}

TEST_CASE("property: critical spike follows the rank-one deformed law") {
  // one population eigenvalue exactly at 1/d_N of the de-spiked model: the
  // rescaled largest eigenvalue follows F_1, strictly below Tracy-Widom
  const int n = 200, N = 200;
  std::vector<double> base_lambdas(n - 1, 1.0);
  WishartModel base(n - 1, N, base_lambdas);
  auto base_edges = find_edges(base.spectral_measure(), base.gamma());
  const EdgeReport& right = base_edges.back();
  FiniteNEdge fe = finite_n_edge(right, base);

  std::vector<double> lambdas = base_lambdas;
  lambdas.push_back(1.0 / fe.preimage); // spike at criticality
  WishartModel spiked(n, N, lambdas);

  const long trials = 400;
  const double n23 = std::pow(static_cast<double>(N), 2.0 / 3.0);
  std::vector<double> samples(trials);
  for (long t = 0; t < trials; ++t) {
    std::vector<double> draw = sample_wishart(spiked, 777, t);
    samples[t] = n23 * fe.scaling * (draw[n - 1] - fe.position);
  }
  // tabulate F_1 once
  std::vector<double> grid_f(161);
  for (int i = 0; i <= 160; ++i) grid_f[i] = deformed_tw_cdf(1, -10.0 + 0.1 * i);
  auto f1 = [&](double s) {
    if (s <= -10.0) return 0.0;
    double pos = (s + 10.0) / 0.1;
    auto idx = static_cast<std::size_t>(pos);
    if (idx + 1 >= grid_f.size()) return 1.0;
    return grid_f[idx] + (pos - idx) * (grid_f[idx + 1] - grid_f[idx]);
  };
  double d = ks_distance(samples, f1);
  CHECK(d < 0.15); // 3/sqrt(400) plus finite-N allowance

  // stochastic ordering vs the undeformed law: P(sample <= 0) near F_1(0),
  // well below F_2(0)
  long below = 0;
  for (double s : samples)
    if (s <= 0.0) ++below;
  double ecdf0 = static_cast<double>(below) / trials;
  CHECK(ecdf0 < tw_cdf(0.0) - 0.1);
  CHECK(deformed_tw_cdf(1, 0.0) <= tw_cdf(0.0));
}
