#ifndef WISHART_MONTECARLO_HPP
#define WISHART_MONTECARLO_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "wishart/measure.hpp"
#include "wishart/support.hpp"

namespace wishart {

struct SimulationSummary {
  long trials = 0;
  std::vector<double> samples;
  std::vector<std::pair<double, double>> paired_samples;
  double ks_distance = 0.0;
  double mean = 0.0;
  double variance = 0.0;
  std::optional<double> correlation;
  std::uint64_t seed = 0;
};

/// One draw of the companion spectrum: ascending eigenvalues x~_1..x~_n of
/// (1/N) Sigma^{1/2} X* X Sigma^{1/2}, computed on the smaller Gram side and
/// padded with the max(n-N, 0) structural zeros.
std::vector<double> sample_wishart(const WishartModel& model, std::uint64_t seed,
                                   std::uint64_t trial = 0);

namespace detail {
struct SpectrumDraw {
  std::vector<double> eigenvalues; // length n, ascending
  double trace = 0.0;              // trace of the sampled Gram matrix
};
SpectrumDraw sample_wishart_with_trace(const WishartModel& model, std::uint64_t seed,
                                       std::uint64_t trial);
} // namespace detail

/// One-sample Kolmogorov-Smirnov distance between samples and a CDF:
/// sup_i max(i/m - F(x_(i)), F(x_(i)) - (i-1)/m).
double ks_distance(std::vector<double> samples, const std::function<double(double)>& cdf);

/// Tracy-Widom CDF tabulated on a fixed grid with linear interpolation;
/// cached after the first call.
double tw_cdf_interpolated(double s);
/// Quantile of the tabulated Tracy-Widom law.
double tw_quantile(double u);

/// Rescaled extremal-eigenvalue fluctuations at a regular soft edge against
/// the Tracy-Widom law. The edge must carry finite-N data and an extremal
/// index (see finite_n_edge / extremal_index).
SimulationSummary run_edge_fluctuations(const WishartModel& model, const EdgeReport& edge,
                                        long trials, std::uint64_t seed, int threads = 0);

/// Joint fluctuations at two distinct regular edges: Pearson correlation and
/// the sup distance between the joint ECDF and the product of marginals.
SimulationSummary run_independence(const WishartModel& model, const EdgeReport& edge_a,
                                   const EdgeReport& edge_b, long trials, std::uint64_t seed,
                                   int threads = 0);

/// Hard-edge fluctuations N^2 sigma_N x_min for n = N + alpha, |alpha| <= 5,
/// against the Bessel gap law.
SimulationSummary run_hard_edge(const WishartModel& model, long trials, std::uint64_t seed,
                                int threads = 0);

enum class ConditionMode { Auto, SoftEdges, HardEdge };

/// Condition-number experiment. SoftEdges (gamma > 1): samples of kappa_N
/// with mean targeting b/a and N^{2/3}(kappa_N - b_N/a_N) fluctuations tested
/// against the two-sided Tracy-Widom convolution. HardEdge (n = N + alpha):
/// samples of kappa_N/N^2 tested against the law of b*sigma/X with X drawn
/// from the Bessel gap law. Models with an outlier above the bulk are
/// refused (OutlierPresentError).
SimulationSummary run_condition_number(const WishartModel& model, long trials,
                                       std::uint64_t seed,
                                       ConditionMode mode = ConditionMode::Auto,
                                       int threads = 0);

} // namespace wishart

#endif // WISHART_MONTECARLO_HPP
