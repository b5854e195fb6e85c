#ifndef WISHART_SPECFUN_HPP
#define WISHART_SPECFUN_HPP

#include <complex>
#include <vector>

#include "wishart/errors.hpp"

namespace wishart {

/// Airy function Ai(x), |x| <= 200. Absolute error <= 1e-12 on [-15, 15],
/// relative error <= 1e-10 for x > 15.
double airy_ai(double x);
double airy_ai_prime(double x);

/// Ai and Ai' together (they share the evaluation path).
std::pair<double, double> airy_ai_both(double x);

/// Bessel function of the first kind, integer order, x in (0, 1e4],
/// |alpha| <= 50. Relative error <= 1e-10 for x <= 50.
double bessel_j(int alpha, double x);

/// J_alpha'(x) from x J'_a(x) = alpha J_a(x) - x J_{a+1}(x).
double bessel_j_prime(int alpha, double x);

/// Airy kernel (Ai(x)Ai'(y) - Ai(y)Ai'(x))/(x - y); for |x-y| <= 1e-6 the
/// diagonal expansion Ai'(m)^2 - m Ai(m)^2 at the midpoint plus its h^2
/// correction is used.
double airy_kernel(double x, double y);

/// Rank-k deformed Airy kernel, evaluated as a double contour integral over
/// rays through p > 0 and -p; recovers the Airy kernel at k = 0. The result
/// is real up to 1e-9; the residual is discarded.
double deformed_airy_kernel(int k, double x, double y, int nodes_per_ray = 128);

/// Bessel kernel with integer parameter alpha; diagonal handled through the
/// closed form of the factorized representation.
double bessel_kernel(int alpha, double x, double y);

/// Conjugated Bessel kernel (x/y)^{alpha/2} K_Be(x,y) as a double contour
/// integral over the circles |z| = r < |w| = R; value is independent of the
/// radii. Throws ContourOrderError if r >= R.
double bessel_kernel_contour(int alpha, double x, double y, double r, double R,
                             int nodes = 256);

namespace detail {

/// Series/Miller evaluation without the public domain guard; the Fredholm
/// matrix builders need orders one past the public |alpha| <= 50 limit.
double bessel_j_unchecked(int alpha, double x);

/// Quadrature nodes and complex weights along the two Airy-type rays Xi
/// (angles +-pi/3 through z_anchor) and Xi' (angles +-2pi/3 through
/// w_anchor < z_anchor); shared by the pointwise kernels and the Fredholm
/// matrix builders. For the rank-k deformed kernel the pole of z^{-k} at the
/// origin must lie to the right of Xi, so both anchors sit on the negative
/// axis there.
struct RayContour {
  std::vector<std::complex<double>> z_nodes, z_weights;
  std::vector<std::complex<double>> w_nodes, w_weights;
  double z_anchor = 1.0;
  double w_anchor = -1.0;
};

RayContour make_airy_rays(double z_anchor, double w_anchor, double reach,
                          int nodes_per_ray);

} // namespace detail

} // namespace wishart

#endif // WISHART_SPECFUN_HPP
