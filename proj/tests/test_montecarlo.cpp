#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <numeric>

#include "wishart/hermitian_eig.hpp"
#include "wishart/montecarlo.hpp"
#include "wishart/rng.hpp"
#include "wishart/support.hpp"

using namespace wishart;

namespace {

WishartModel identity_model(int n, int N) {
  return WishartModel(n, N, std::vector<double>(n, 1.0));
}

EdgeReport prepared_edge(const WishartModel& model, bool rightmost) {
  auto edges = find_edges(model.spectral_measure(), model.gamma());
  EdgeReport e = rightmost ? edges.back() : edges.front();
  e.finite_n = finite_n_edge(e, model);
  e.extremal_index = extremal_index(e, model);
  return e;
}

} // namespace

TEST_CASE("tridiagonal QL reproduces the discrete laplacian spectrum") {
  const int m = 10;
  std::vector<double> d(m, 0.0), e(m - 1, 1.0);
  tridiagonal_ql(d, e);
  std::sort(d.begin(), d.end());
  const double pi = 3.14159265358979323846;
  for (int k = 0; k < m; ++k) {
    double expected = 2.0 * std::cos(pi * (m - k) / (m + 1));
    CHECK(d[k] == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("hermitian eigenvalues of closed-form matrices") {
  using C = std::complex<double>;
  std::vector<C> a{C(2, 0), C(0, 1), C(0, -1), C(2, 0)}; // [[2, i], [-i, 2]]
  auto vals = hermitian_eigenvalues(a, 2);
  CHECK(vals[0] == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(vals[1] == doctest::Approx(3.0).epsilon(1e-13));

  // generic 2x2 with the quadratic-formula oracle
  double p = 1.5, q = -0.7, b = 0.3, c = 0.8;
  std::vector<C> m{C(p, 0), C(b, c), C(b, -c), C(q, 0)};
  auto w = hermitian_eigenvalues(m, 2);
  double mid = 0.5 * (p + q);
  double rad = std::sqrt(0.25 * (p - q) * (p - q) + b * b + c * c);
  CHECK(w[0] == doctest::Approx(mid - rad).epsilon(1e-13));
  CHECK(w[1] == doctest::Approx(mid + rad).epsilon(1e-13));
}

TEST_CASE("hermitian eigenvalues satisfy trace identities") {
  const int n = 24;
  TrialRng rng(7, 0);
  std::vector<std::complex<double>> a(n * n);
  for (int i = 0; i < n; ++i) {
    a[i * n + i] = rng.gaussian();
    for (int j = 0; j < i; ++j) {
      std::complex<double> v = rng.complex_gaussian();
      a[i * n + j] = v;
      a[j * n + i] = std::conj(v);
    }
  }
  double trace = 0.0, frob = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) trace += a[i * n + j].real();
      frob += std::norm(a[i * n + j]);
    }
  auto vals = hermitian_eigenvalues(a, n);
  double sum = std::accumulate(vals.begin(), vals.end(), 0.0);
  double sumsq = 0.0;
  for (double v : vals) sumsq += v * v;
  double scale = std::sqrt(frob);
  CHECK(std::abs(sum - trace) <= 1e-10 * scale * n);
  CHECK(std::abs(sumsq - frob) <= 1e-10 * frob);
}

TEST_CASE("wishart draws are positive with the right zero padding") {
  WishartModel tall = identity_model(12, 5); // n > N: 7 structural zeros
  auto draw = sample_wishart(tall, 11, 0);
  REQUIRE(draw.size() == 12);
  for (int i = 0; i < 7; ++i) CHECK(draw[i] == 0.0);
  for (int i = 7; i < 12; ++i) CHECK(draw[i] > 0.0);

  WishartModel wide = identity_model(5, 12); // n < N: all random
  auto draw2 = sample_wishart(wide, 11, 0);
  REQUIRE(draw2.size() == 5);
  for (double v : draw2) CHECK(v > 0.0);
}

TEST_CASE("per-trial trace identity") {
  std::vector<double> lambdas{0.5, 0.5, 1.0, 1.0, 1.0, 2.0, 3.0, 3.0};
  WishartModel model(8, 20, lambdas);
  for (std::uint64_t t = 0; t < 5; ++t) {
    auto draw = detail::sample_wishart_with_trace(model, 3, t);
    double sum = std::accumulate(draw.eigenvalues.begin(), draw.eigenvalues.end(), 0.0);
    CHECK(std::abs(sum - draw.trace) <= 1e-8 * draw.trace);
  }
}

TEST_CASE("expected trace matches the population trace") {
  std::vector<double> lambdas{0.5, 0.5, 1.0, 1.0, 1.0, 1.0, 2.0, 2.0, 3.0, 3.0};
  WishartModel model(10, 25, lambdas);
  const int trials = 500;
  double target = std::accumulate(lambdas.begin(), lambdas.end(), 0.0);
  std::vector<double> traces(trials);
  for (int t = 0; t < trials; ++t)
    traces[t] = detail::sample_wishart_with_trace(model, 29, t).trace;
  double mean = std::accumulate(traces.begin(), traces.end(), 0.0) / trials;
  double var = 0.0;
  for (double v : traces) var += (v - mean) * (v - mean);
  var /= (trials - 1);
  double se = std::sqrt(var / trials);
  CHECK(std::abs(mean - target) <= 4.0 * se);
}

TEST_CASE("one-dimensional wishart is exponential") {
  WishartModel model = identity_model(1, 1);
  std::vector<double> samples(1000);
  for (int t = 0; t < 1000; ++t) samples[t] = sample_wishart(model, 5, t)[0];
  double d = ks_distance(samples, [](double x) { return 1.0 - std::exp(-x); });
  CHECK(d < 0.05);
}

TEST_CASE("ks distance basics") {
  // a single sample at the median of any CDF gives exactly 1/2
  CHECK(ks_distance({0.0}, [](double x) { return x < 0.0 ? 0.25 : 0.5; }) ==
        doctest::Approx(0.5));
  // samples at the (i - 1/2)/m quantiles achieve the floor 1/(2m)
  const int m = 20;
  std::vector<double> best(m);
  for (int i = 0; i < m; ++i) best[i] = (i + 0.5) / m;
  CHECK(ks_distance(best, [](double x) { return x; }) == doctest::Approx(0.5 / m));
  CHECK_THROWS_AS(ks_distance({}, [](double) { return 0.0; }), EmptySamplesError);
}

TEST_CASE("uniform draws pass a ks bound") {
  TrialRng rng(123, 77);
  std::vector<double> u(10000);
  for (double& v : u) v = rng.uniform();
  CHECK(ks_distance(u, [](double x) { return std::min(std::max(x, 0.0), 1.0); }) < 0.02);
}

TEST_CASE("experiments are deterministic across thread counts") {
  WishartModel model = identity_model(40, 40);
  SimulationSummary one = run_hard_edge(model, 24, 99, 1);
  SimulationSummary two = run_hard_edge(model, 24, 99, 2);
  SimulationSummary four = run_hard_edge(model, 24, 99, 4);
  REQUIRE(one.samples.size() == two.samples.size());
  for (std::size_t i = 0; i < one.samples.size(); ++i) {
    CHECK(one.samples[i] == two.samples[i]);
    CHECK(one.samples[i] == four.samples[i]);
  }
  CHECK(one.ks_distance == two.ks_distance);
}

TEST_CASE("hard edge experiment rejects wrong shapes") {
  CHECK_THROWS_AS(run_hard_edge(identity_model(20, 10), 10, 1), ShapeMismatchError);
}

TEST_CASE("hard edge smoke run tracks the exponential law") {
  WishartModel model = identity_model(30, 30);
  SimulationSummary s = run_hard_edge(model, 400, 2024);
  CHECK(s.ks_distance < 0.12); // 3/sqrt(400) plus small-N slack
  CHECK(s.trials == 400);
}

TEST_CASE("hard edge law holds for a mixed population") {
  // lambda half 1/2 and half 2: sigma_N = 4*(1/2)*(2 + 1/2) = 5
  std::vector<double> lambdas(50, 0.5);
  lambdas.insert(lambdas.end(), 50, 2.0);
  WishartModel model(100, 100, lambdas);
  CHECK(hard_edge_sigma(model) == doctest::Approx(5.0));
  SimulationSummary s = run_hard_edge(model, 600, 808);
  CHECK(s.ks_distance < 0.1);
}

TEST_CASE("edge fluctuation experiment requires prepared edges") {
  WishartModel model = identity_model(40, 20);
  auto edges = find_edges(model.spectral_measure(), model.gamma());
  CHECK_THROWS_AS(run_edge_fluctuations(model, edges.back(), 10, 1), ValidationError);
}

TEST_CASE("edge fluctuations smoke run against tracy-widom") {
  WishartModel model = identity_model(120, 60);
  EdgeReport right = prepared_edge(model, true);
  CHECK(*right.extremal_index == 120);
  SimulationSummary s = run_edge_fluctuations(model, right, 300, 7);
  CHECK(s.ks_distance < 0.18);
  CHECK(std::abs(s.mean) < 3.0); // rescaled samples are O(1), centered near -1.77
}

TEST_CASE("independence experiment rejects a repeated edge") {
  WishartModel model = identity_model(120, 60);
  EdgeReport right = prepared_edge(model, true);
  CHECK_THROWS_AS(run_independence(model, right, right, 10, 1),
                  DistinctEdgesRequiredError);
}

TEST_CASE("independence smoke run shows weak correlation") {
  WishartModel model = identity_model(120, 60);
  EdgeReport left = prepared_edge(model, false);
  EdgeReport right = prepared_edge(model, true);
  SimulationSummary s = run_independence(model, left, right, 300, 13);
  REQUIRE(s.correlation.has_value());
  CHECK(std::abs(*s.correlation) < 0.25);
  CHECK(s.ks_distance < 0.2);
}

TEST_CASE("condition number mode checks") {
  CHECK_THROWS_AS(run_condition_number(identity_model(30, 60), 10, 1), ModeMismatchError);
  // spike far above the bulk: refused in gamma > 1 mode
  std::vector<double> spiked(200, 1.0);
  spiked.back() = 25.0;
  WishartModel bad(200, 50, spiked);
  CHECK_THROWS_AS(run_condition_number(bad, 10, 1, ConditionMode::SoftEdges),
                  OutlierPresentError);
}

TEST_CASE("condition number hard-edge smoke run") {
  WishartModel model = identity_model(40, 40);
  SimulationSummary s = run_condition_number(model, 300, 31, ConditionMode::HardEdge);
  CHECK(s.ks_distance < 0.15);
}
