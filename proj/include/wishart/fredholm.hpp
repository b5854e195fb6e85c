#ifndef WISHART_FREDHOLM_HPP
#define WISHART_FREDHOLM_HPP

#include <functional>
#include <variant>

#include "wishart/measure.hpp"

namespace wishart {

/// Double contour geometry for the finite-N kernel: Theta is the circle
/// |w| = theta_radius around the origin (Re w < q), Gamma the circle around
/// gamma_center of radius gamma_radius enclosing every 1/lambda_j (Re z > q).
struct ContourSpec {
  double q = 0.0;
  double theta_radius = 0.0;
  double gamma_center = 0.0;
  double gamma_radius = 0.0;
  int nodes_per_contour = 256;
};

/// Default geometry for a model: q = 1/(2 lambda_max), Theta radius q/2,
/// Gamma covering [1/lambda_max, 1/lambda_min] with margin 0.4(1/lambda_max - q).
ContourSpec default_contour(const WishartModel& model);

void validate_contour(const ContourSpec& contour, const WishartModel& model);

struct AiryVariant {};
struct DeformedAiryVariant {
  int k;
};
struct BesselVariant {
  int alpha;
};
struct FiniteNVariant {
  WishartModel model;
  ContourSpec contour;
};

/// Which correlation kernel a Fredholm determinant is taken over.
struct KernelSpec {
  std::variant<AiryVariant, DeformedAiryVariant, BesselVariant, FiniteNVariant> variant;

  static KernelSpec airy() { return {AiryVariant{}}; }
  static KernelSpec deformed_airy(int k);
  static KernelSpec bessel(int alpha);
  static KernelSpec finite_n(WishartModel model, ContourSpec contour);
};

struct FredholmResult {
  double value = 1.0;
  int order = 0;
  double error_estimate = 0.0; // |value(order) - value(order/2)|
  double imag_residual = 0.0;
};

/// Nystrom determinant det(I - K) on L^2(lo, hi): Gauss-Legendre nodes,
/// symmetrized weighting sqrt(w) K sqrt(w), LU with partial pivoting.
/// Throws QuadratureDivergenceError if the node-halving error estimate
/// exceeds 1e-4 at the maximum order 2048.
FredholmResult fredholm_det(const KernelSpec& kernel, double lo, double hi, int order);

/// Same discretization for an arbitrary real kernel callable (oracle and
/// property-test path).
FredholmResult fredholm_det(const std::function<double(double, double)>& kernel, double lo,
                            double hi, int order);

/// Tracy-Widom CDF det(I - K_Ai) on L^2(s, inf), truncated to (s, s+window)
/// widened so the Airy tail contributes below 1e-12.
FredholmResult tw_cdf_full(double s, int order = 96, double window = 16.0);
double tw_cdf(double s);

/// CDF of the rank-k deformed Tracy-Widom law F_k.
FredholmResult deformed_tw_cdf_full(int k, double s, int order = 96, double window = 16.0);
double deformed_tw_cdf(int k, double s);

/// Hard-edge gap probability det(I - K_Be,alpha) on L^2(0, s).
FredholmResult bessel_gap_full(int alpha, double s, int order = 64);
double bessel_gap(int alpha, double s);

/// Finite-N correlation kernel K_N(x, y) by trapezoidal double contour
/// quadrature, with the exponential factors accumulated in log form.
/// Throws ContourPoleCollisionError / NumericalOverflowError as appropriate.
double finite_kernel(const WishartModel& model, const ContourSpec& contour, double x,
                     double y);

/// Gap probability of the finite-N determinantal process on (lo, hi):
/// non-symmetric complex Nystrom determinant, real part returned.
FredholmResult finite_gap_probability(const WishartModel& model, const ContourSpec& contour,
                                      double lo, double hi, int order);

} // namespace wishart

#endif // WISHART_FREDHOLM_HPP
