#include "wishart/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "wishart/fredholm.hpp"
#include "wishart/hermitian_eig.hpp"
#include "wishart/rng.hpp"

namespace wishart {

namespace detail {

SpectrumDraw sample_wishart_with_trace(const WishartModel& model, std::uint64_t seed,
                                       std::uint64_t trial) {
  const int n = model.n();
  const int N = model.N();
  const std::vector<double>& lambdas = model.lambdas();
  TrialRng rng(seed, trial);
  SpectrumDraw draw;

  if (n <= N) {
    // companion side: G = X*X (n x n), M = (1/N) L^{1/2} G L^{1/2}
    std::vector<std::complex<double>> g(n * n, 0.0);
    std::vector<std::complex<double>> row(n);
    for (int i = 0; i < N; ++i) {
      for (int j = 0; j < n; ++j) row[j] = rng.complex_gaussian();
      for (int j = 0; j < n; ++j) {
        const std::complex<double> cj = std::conj(row[j]);
        for (int k = 0; k <= j; ++k) g[j * n + k] += cj * row[k];
      }
    }
    for (int j = 0; j < n; ++j)
      for (int k = 0; k <= j; ++k) {
        double scale = std::sqrt(lambdas[j] * lambdas[k]) / N;
        g[j * n + k] *= scale;
        g[k * n + j] = std::conj(g[j * n + k]);
      }
    for (int j = 0; j < n; ++j) draw.trace += g[j * n + j].real();
    draw.eigenvalues = hermitian_eigenvalues(std::move(g), n);
  } else {
    // data side: M = (1/N) X L X* (N x N), same nonzero spectrum
    std::vector<std::complex<double>> m(N * N, 0.0);
    std::vector<std::complex<double>> col(N);
    for (int k = 0; k < n; ++k) {
      for (int i = 0; i < N; ++i) col[i] = rng.complex_gaussian();
      const double w = lambdas[k] / N;
      for (int i = 0; i < N; ++i) {
        const std::complex<double> wc = w * col[i];
        for (int l = 0; l <= i; ++l) m[i * N + l] += wc * std::conj(col[l]);
      }
    }
    for (int i = 0; i < N; ++i)
      for (int l = 0; l < i; ++l) m[l * N + i] = std::conj(m[i * N + l]);
    for (int i = 0; i < N; ++i) draw.trace += m[i * N + i].real();
    std::vector<double> vals = hermitian_eigenvalues(std::move(m), N);
    draw.eigenvalues.assign(n - N, 0.0); // structural zeros of the companion
    draw.eigenvalues.insert(draw.eigenvalues.end(), vals.begin(), vals.end());
  }
  for (double& v : draw.eigenvalues)
    if (v < 0.0) v = 0.0; // PSD spectrum, clamp eigensolver roundoff
  std::sort(draw.eigenvalues.begin(), draw.eigenvalues.end());
  return draw;
}

} // namespace detail

std::vector<double> sample_wishart(const WishartModel& model, std::uint64_t seed,
                                   std::uint64_t trial) {
  return detail::sample_wishart_with_trace(model, seed, trial).eigenvalues;
}

namespace {

void parallel_trials(long trials, int threads, const std::function<void(long)>& body) {
  if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
  threads = static_cast<int>(std::max<long>(1, std::min<long>(threads, trials)));
  if (threads == 1) {
    for (long t = 0; t < trials; ++t) body(t);
    return;
  }
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([&, w]() {
      try {
        for (long t = w; t < trials; t += threads) body(t);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

struct TabulatedCdf {
  double lo = 0.0;
  double step = 0.0;
  std::vector<double> values;

  double operator()(double x) const {
    if (x <= lo) return values.front();
    double pos = (x - lo) / step;
    auto idx = static_cast<std::size_t>(pos);
    if (idx + 1 >= values.size()) return values.back();
    double frac = pos - static_cast<double>(idx);
    return values[idx] + frac * (values[idx + 1] - values[idx]);
  }

  double quantile(double u) const {
    auto it = std::lower_bound(values.begin(), values.end(), u);
    if (it == values.begin()) return lo;
    if (it == values.end()) return lo + step * (values.size() - 1);
    std::size_t hi_idx = it - values.begin();
    double f0 = values[hi_idx - 1], f1 = values[hi_idx];
    double frac = (f1 > f0) ? (u - f0) / (f1 - f0) : 0.0;
    return lo + step * (hi_idx - 1 + frac);
  }
};

const TabulatedCdf& tw_table() {
  static TabulatedCdf table = [] {
    TabulatedCdf t;
    t.lo = -12.0;
    t.step = 0.05;
    const int count = 371; // up to +6.5
    t.values.resize(count);
    for (int i = 0; i < count; ++i)
      t.values[i] = tw_cdf_full(t.lo + i * t.step).value;
    for (int i = 1; i < count; ++i) t.values[i] = std::max(t.values[i], t.values[i - 1]);
    return t;
  }();
  return table;
}

TabulatedCdf bessel_cdf_table(int alpha, double smax) {
  TabulatedCdf t;
  t.lo = 0.0;
  t.step = std::max(smax, 1.0) / 600.0;
  t.values.resize(602);
  t.values[0] = 0.0;
  for (int i = 1; i < 602; ++i)
    t.values[i] = 1.0 - bessel_gap_full(alpha, i * t.step).value;
  for (int i = 1; i < 602; ++i) t.values[i] = std::max(t.values[i], t.values[i - 1]);
  return t;
}

double sample_mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double sample_variance(const std::vector<double>& v, double mean) {
  if (v.size() < 2) return 0.0;
  double s = 0.0;
  for (double x : v) s += (x - mean) * (x - mean);
  return s / static_cast<double>(v.size() - 1);
}

/// Low-multiplicity population atoms classified against the de-spiked base
/// measure: g'_base(1/zeta) < 0 means the atom throws eigenvalues outside
/// the bulk (so x_1 or x_N no longer converge to the bulk edges).
bool has_outlier_spike(const WishartModel& model) {
  AtomicMeasure nu = model.spectral_measure();
  if (nu.size() < 2) return false;
  const int n = model.n();
  const long spike_cap = std::max(3L, static_cast<long>(n) / 100);
  for (const Atom& candidate : nu.atoms()) {
    long count = std::lround(candidate.weight * n);
    if (count > spike_cap) continue;
    std::vector<Atom> rest;
    for (const Atom& a : nu.atoms())
      if (a.lambda != candidate.lambda) rest.push_back(a);
    double mass = 0.0;
    for (Atom& a : rest) mass += a.weight;
    for (Atom& a : rest) a.weight /= mass;
    AtomicMeasure base(std::move(rest));
    ShapeRatio gamma_base(model.gamma().gamma * mass);
    try {
      if (classify_spike(base, gamma_base, candidate.lambda).kind == SpikeKind::Outlier)
        return true;
    } catch (const PoleProximityError&) {
      continue; // 1/zeta collides with a base pole: not an isolated spike
    }
  }
  return false;
}

void require_finite_edge(const EdgeReport& edge, const char* who) {
  if (edge.hard) throw ValidationError(std::string(who) + ": hard edge not supported here");
  if (!edge.finite_n)
    throw ValidationError(std::string(who) + ": edge lacks finite-N data (run finite_n_edge)");
  if (!edge.extremal_index)
    throw ValidationError(std::string(who) + ": edge lacks an extremal index");
}

double rescale_at_edge(const EdgeReport& edge, double x, double n23) {
  const FiniteNEdge& fe = *edge.finite_n;
  return edge.side == Side::Right ? n23 * fe.scaling * (x - fe.position)
                                  : n23 * fe.scaling * (fe.position - x);
}

} // namespace

double ks_distance(std::vector<double> samples, const std::function<double(double)>& cdf) {
  if (samples.empty()) throw EmptySamplesError("ks_distance: no samples");
  std::sort(samples.begin(), samples.end());
  const double m = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    double f = cdf(samples[i]);
    d = std::max(d, (static_cast<double>(i) + 1.0) / m - f);
    d = std::max(d, f - static_cast<double>(i) / m);
  }
  return d;
}

double tw_cdf_interpolated(double s) { return tw_table()(s); }
double tw_quantile(double u) { return tw_table().quantile(u); }

SimulationSummary run_edge_fluctuations(const WishartModel& model, const EdgeReport& edge,
                                        long trials, std::uint64_t seed, int threads) {
  require_finite_edge(edge, "run_edge_fluctuations");
  if (trials < 1) throw ValidationError("run_edge_fluctuations: trials must be >= 1");
  const int idx = *edge.extremal_index;
  if (idx < 1 || idx > model.n())
    throw ValidationError("run_edge_fluctuations: extremal index out of range");
  const double n23 = std::pow(static_cast<double>(model.N()), 2.0 / 3.0);

  SimulationSummary summary;
  summary.trials = trials;
  summary.seed = seed;
  summary.samples.resize(trials);
  parallel_trials(trials, threads, [&](long t) {
    std::vector<double> draw = sample_wishart(model, seed, t);
    summary.samples[t] = rescale_at_edge(edge, draw[idx - 1], n23);
  });
  summary.mean = sample_mean(summary.samples);
  summary.variance = sample_variance(summary.samples, summary.mean);
  const TabulatedCdf& tw = tw_table();
  summary.ks_distance = ks_distance(summary.samples, [&](double x) { return tw(x); });
  return summary;
}

SimulationSummary run_independence(const WishartModel& model, const EdgeReport& edge_a,
                                   const EdgeReport& edge_b, long trials, std::uint64_t seed,
                                   int threads) {
  require_finite_edge(edge_a, "run_independence");
  require_finite_edge(edge_b, "run_independence");
  if (edge_a.side == edge_b.side &&
      std::abs(edge_a.preimage - edge_b.preimage) < 1e-10)
    throw DistinctEdgesRequiredError("run_independence: the two edges coincide");
  if (trials < 2) throw ValidationError("run_independence: needs at least 2 trials");
  const int ia = *edge_a.extremal_index;
  const int ib = *edge_b.extremal_index;
  const double n23 = std::pow(static_cast<double>(model.N()), 2.0 / 3.0);

  SimulationSummary summary;
  summary.trials = trials;
  summary.seed = seed;
  summary.paired_samples.resize(trials);
  parallel_trials(trials, threads, [&](long t) {
    std::vector<double> draw = sample_wishart(model, seed, t);
    summary.paired_samples[t] = {rescale_at_edge(edge_a, draw[ia - 1], n23),
                                 rescale_at_edge(edge_b, draw[ib - 1], n23)};
  });

  const double m = static_cast<double>(trials);
  std::vector<double> u(trials), v(trials);
  for (long t = 0; t < trials; ++t) {
    u[t] = summary.paired_samples[t].first;
    v[t] = summary.paired_samples[t].second;
  }
  const double mu = sample_mean(u), mv = sample_mean(v);
  double suu = 0.0, svv = 0.0, suv = 0.0;
  for (long t = 0; t < trials; ++t) {
    suu += (u[t] - mu) * (u[t] - mu);
    svv += (v[t] - mv) * (v[t] - mv);
    suv += (u[t] - mu) * (v[t] - mv);
  }
  summary.correlation = suv / std::sqrt(suu * svv);
  summary.mean = mu;
  summary.variance = sample_variance(u, mu);

  // sup |joint ECDF - product of marginal ECDFs| over the sample points
  std::vector<double> us = u, vs = v;
  std::sort(us.begin(), us.end());
  std::sort(vs.begin(), vs.end());
  double dist = 0.0;
  for (long i = 0; i < trials; ++i) {
    long joint = 0;
    for (long j = 0; j < trials; ++j)
      if (u[j] <= u[i] && v[j] <= v[i]) ++joint;
    double fu = static_cast<double>(std::upper_bound(us.begin(), us.end(), u[i]) - us.begin()) / m;
    double fv = static_cast<double>(std::upper_bound(vs.begin(), vs.end(), v[i]) - vs.begin()) / m;
    dist = std::max(dist, std::abs(static_cast<double>(joint) / m - fu * fv));
  }
  summary.ks_distance = dist;
  return summary;
}

SimulationSummary run_hard_edge(const WishartModel& model, long trials, std::uint64_t seed,
                                int threads) {
  const int alpha = model.n() - model.N();
  if (std::abs(alpha) > 5)
    throw ShapeMismatchError("run_hard_edge: requires n = N + alpha with |alpha| <= 5");
  if (trials < 1) throw ValidationError("run_hard_edge: trials must be >= 1");
  // sigma_N/4 puts the rescaled minimum in the units where the alpha = 0 law
  // is exactly Exp(1); bessel_gap uses the matching normalization
  const double sigma = hard_edge_sigma(model) / 4.0;
  const double scale = static_cast<double>(model.N()) * model.N() * sigma;
  const int min_index = std::max(alpha, 0); // x_min = x~_{alpha+1} for alpha >= 0

  SimulationSummary summary;
  summary.trials = trials;
  summary.seed = seed;
  summary.samples.resize(trials);
  parallel_trials(trials, threads, [&](long t) {
    std::vector<double> draw = sample_wishart(model, seed, t);
    summary.samples[t] = scale * draw[min_index];
  });
  summary.mean = sample_mean(summary.samples);
  summary.variance = sample_variance(summary.samples, summary.mean);
  double smax = *std::max_element(summary.samples.begin(), summary.samples.end());
  TabulatedCdf cdf = bessel_cdf_table(alpha, std::min(smax * 1.05 + 1.0, 500.0));
  summary.ks_distance = ks_distance(summary.samples, [&](double x) { return cdf(x); });
  return summary;
}

SimulationSummary run_condition_number(const WishartModel& model, long trials,
                                       std::uint64_t seed, ConditionMode mode, int threads) {
  const int n = model.n();
  const int N = model.N();
  const int alpha = n - N;
  const double gamma_n = static_cast<double>(n) / N;
  if (mode == ConditionMode::Auto)
    mode = (alpha >= 0 && alpha <= 5) ? ConditionMode::HardEdge
           : (gamma_n > 1.0)          ? ConditionMode::SoftEdges
                                      : ConditionMode::Auto;
  if (mode == ConditionMode::Auto || (mode == ConditionMode::SoftEdges && gamma_n <= 1.0) ||
      (mode == ConditionMode::HardEdge && (alpha < 0 || alpha > 5)))
    throw ModeMismatchError("run_condition_number: model fits neither the gamma>1 nor the "
                            "hard-edge regime");
  if (trials < 1) throw ValidationError("run_condition_number: trials must be >= 1");

  if (has_outlier_spike(model))
    throw OutlierPresentError(
        "run_condition_number: a spike produces an outlier, so the extreme eigenvalues "
        "do not converge to the bulk edges");
  AtomicMeasure nu = model.spectral_measure();
  ShapeRatio gamma = model.gamma();
  std::vector<EdgeReport> edges = find_edges(nu, gamma);
  const EdgeReport& rightmost = edges.back();
  if (extremal_index(rightmost, model) != n)
    throw OutlierPresentError(
        "run_condition_number: an outlier sits above the bulk (x_N does not converge to b)");

  SimulationSummary summary;
  summary.trials = trials;
  summary.seed = seed;
  summary.samples.resize(trials);

  if (mode == ConditionMode::SoftEdges) {
    const EdgeReport& leftmost = edges.front();
    if (leftmost.hard)
      throw ModeMismatchError("run_condition_number: leftmost edge is hard, not gamma > 1");
    FiniteNEdge left_n = finite_n_edge(leftmost, model);
    FiniteNEdge right_n = finite_n_edge(rightmost, model);
    const double a = leftmost.position, b = rightmost.position;
    const double sigma = leftmost.scaling, delta = rightmost.scaling;
    const double n23 = std::pow(static_cast<double>(N), 2.0 / 3.0);

    parallel_trials(trials, threads, [&](long t) {
      std::vector<double> draw = sample_wishart(model, seed, t);
      summary.samples[t] = draw[n - 1] / draw[n - N]; // x_N / x_1 of M_N
    });
    summary.mean = sample_mean(summary.samples);
    summary.variance = sample_variance(summary.samples, summary.mean);

    std::vector<double> fluct(trials);
    const double center = right_n.position / left_n.position;
    for (long t = 0; t < trials; ++t) fluct[t] = n23 * (summary.samples[t] - center);

    // reference draw of X/(delta a) + b Y/(sigma a^2), X and Y independent TW
    const long ref_count = 40000;
    std::vector<double> ref(ref_count);
    TrialRng rng(seed ^ 0xC0DD1710A5ULL, 1);
    for (long t = 0; t < ref_count; ++t) {
      double xq = tw_quantile(rng.uniform());
      double yq = tw_quantile(rng.uniform());
      ref[t] = xq / (delta * a) + b * yq / (sigma * a * a);
    }
    std::sort(ref.begin(), ref.end());
    summary.ks_distance = ks_distance(fluct, [&](double z) {
      return static_cast<double>(std::upper_bound(ref.begin(), ref.end(), z) - ref.begin()) /
             static_cast<double>(ref_count);
    });
    return summary;
  }

  // HardEdge mode: kappa_N / N^2 against the law of b sigma / X, with sigma
  // and the X units matching the bessel_gap normalization
  const double sigma_n = hard_edge_sigma(model) / 4.0;
  const double b = rightmost.position;
  parallel_trials(trials, threads, [&](long t) {
    std::vector<double> draw = sample_wishart(model, seed, t);
    double x1 = draw[alpha];      // x~_{alpha+1} = x_1 of M_N
    double xn = draw[n - 1];
    summary.samples[t] = xn / x1 / (static_cast<double>(N) * N);
  });
  summary.mean = sample_mean(summary.samples);
  summary.variance = sample_variance(summary.samples, summary.mean);
  summary.ks_distance = ks_distance(summary.samples, [&](double z) {
    if (!(z > 0.0)) return 0.0;
    double s = b * sigma_n / z;
    if (s > 500.0) return 0.0; // gap(500) is numerically 0 -> CDF 0 deep left
    return bessel_gap_full(alpha, s).value;
  });
  return summary;
}

} // namespace wishart
